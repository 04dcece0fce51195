import json

import numpy as np
import pytest

from gsfill.camera import CameraPose, load_cameras, quat_to_rotmat, save_cameras_json
from gsfill.errors import InvalidArgument, SchemaError, UnsupportedModel


def test_identity_json_camera(tmp_path):
    path = tmp_path / "cams.json"
    path.write_text(json.dumps([
        {"fx": 1.0, "fy": 1.0, "cx": 0.0, "cy": 0.0, "width": 4, "height": 4,
         "qvec": [1, 0, 0, 0], "tvec": [0, 0, 0]}
    ]))
    (pose,) = load_cameras(path, format="json")
    np.testing.assert_array_equal(pose.world_to_camera, np.eye(4))


def test_unit_quaternion_is_identity_rotation():
    np.testing.assert_allclose(quat_to_rotmat([1, 0, 0, 0]), np.eye(3), atol=1e-15)


def test_colmap_text_reprojection(tmp_path):
    (tmp_path / "cameras.txt").write_text(
        "# cameras\n"
        "1 PINHOLE 8 6 100 120 4 3\n"
        "2 SIMPLE_PINHOLE 8 6 50 4 3\n"
    )
    # camera 2 is rotated 180 degrees about y and shifted
    (tmp_path / "images.txt").write_text(
        "# images\n"
        "1 1 0 0 0 0.5 -0.25 2 1 a.png\n"
        "\n"
        "2 0 0 1 0 0 0 4 2 b.png\n"
        "\n"
    )
    poses = load_cameras(tmp_path, format="colmap-text")
    assert [p.name for p in poses] == ["a.png", "b.png"]

    # hand-computed K [R|t] X for X = (1, 2, 3)
    x = np.array([1.0, 2.0, 3.0])
    p1 = poses[0]
    cam = x + np.array([0.5, -0.25, 2.0])
    expect_u = 100 * cam[0] / cam[2] + 4
    expect_v = 120 * cam[1] / cam[2] + 3
    uv, z = p1.project(x)
    assert uv[0, 0] == pytest.approx(expect_u)
    assert uv[0, 1] == pytest.approx(expect_v)
    assert z[0] == pytest.approx(cam[2])

    p2 = poses[1]
    # quat (0,0,1,0): 180 degrees about y -> cam = (-x, y, -z) + t
    cam2 = np.array([-x[0], x[1], -x[2]]) + np.array([0, 0, 4.0])
    uv2, z2 = p2.project(x)
    assert uv2[0, 0] == pytest.approx(50 * cam2[0] / cam2[2] + 4)
    assert uv2[0, 1] == pytest.approx(50 * cam2[1] / cam2[2] + 3)


def test_unsupported_model(tmp_path):
    (tmp_path / "cameras.txt").write_text("1 OPENCV 8 6 1 1 1 1 0 0 0 0\n")
    (tmp_path / "images.txt").write_text("1 1 0 0 0 0 0 0 1 a.png\n\n")
    with pytest.raises(UnsupportedModel):
        load_cameras(tmp_path)


def test_mismatched_camera_id(tmp_path):
    (tmp_path / "cameras.txt").write_text("1 PINHOLE 8 6 1 1 0 0\n")
    (tmp_path / "images.txt").write_text("1 1 0 0 0 0 0 0 9 a.png\n\n")
    with pytest.raises(SchemaError):
        load_cameras(tmp_path)


def test_json_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    poses = []
    for i in range(4):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        w2c = np.eye(4)
        w2c[:3, :3] = quat_to_rotmat(q)
        w2c[:3, 3] = rng.normal(size=3)
        poses.append(CameraPose(fx=55, fy=60, cx=7.5, cy=7.0, width=16, height=15,
                                world_to_camera=w2c, name=f"v{i}"))
    path = tmp_path / "cams.json"
    save_cameras_json(poses, path)
    loaded = load_cameras(path)
    for orig, back in zip(poses, loaded):
        np.testing.assert_allclose(back.world_to_camera, orig.world_to_camera, atol=1e-12)
        assert back.name == orig.name


def test_invalid_intrinsics_rejected():
    with pytest.raises(InvalidArgument):
        CameraPose(fx=-1, fy=1, cx=0, cy=0, width=4, height=4)
    with pytest.raises(InvalidArgument):
        CameraPose(fx=1, fy=1, cx=10, cy=0, width=4, height=4)
    bad = np.eye(4)
    bad[0, 1] = 0.5
    with pytest.raises(InvalidArgument):
        CameraPose(fx=1, fy=1, cx=0, cy=0, width=4, height=4, world_to_camera=bad)
