import numpy as np
import pytest

from gsfill.errors import ParseError, SchemaError
from gsfill.ply import load_scene_ply, save_scene_ply
from gsfill.scene import GaussianScene, empty_scene

from conftest import random_scene


def three_gaussian_fixture():
    rng = np.random.default_rng(123)
    return random_scene(rng, 3, sh_degree=2)


def assert_scenes_equal(a, b, tol=1e-6):
    assert len(a) == len(b)
    assert a.sh_degree == b.sh_degree
    np.testing.assert_allclose(a.positions, b.positions, atol=tol)
    np.testing.assert_allclose(a.rotations, b.rotations, atol=tol)
    np.testing.assert_allclose(a.log_scales, b.log_scales, atol=tol)
    np.testing.assert_allclose(a.opacities, b.opacities, atol=tol)
    np.testing.assert_allclose(a.sh, b.sh, atol=tol)


def test_empty_scene_round_trip(tmp_path):
    path = tmp_path / "empty.ply"
    save_scene_ply(empty_scene(sh_degree=1), path)
    scene = load_scene_ply(path)
    assert len(scene) == 0
    assert scene.bounds is None


def test_single_vertex_identity_quaternion(tmp_path):
    scene = GaussianScene(
        positions=[[1.0, 2.0, 3.0]],
        rotations=[[1.0, 0.0, 0.0, 0.0]],
        log_scales=[[0.0, 0.0, 0.0]],
        opacities=[0.0],
        sh=np.zeros((1, 1, 3)),
        sh_degree=0,
    )
    path = tmp_path / "one.ply"
    save_scene_ply(scene, path)
    loaded = load_scene_ply(path)
    sigmoid = 1.0 / (1.0 + np.exp(-loaded.opacities[0]))
    assert sigmoid == pytest.approx(0.5)
    np.testing.assert_array_equal(loaded.rotations[0], [1, 0, 0, 0])


def test_round_trip_field_equality(tmp_path):
    scene = three_gaussian_fixture()
    path = tmp_path / "three.ply"
    save_scene_ply(scene, path)
    assert_scenes_equal(load_scene_ply(scene_path := path), scene)

    # byte-equivalence of save(load(f)) modulo header comments
    path2 = tmp_path / "again.ply"
    save_scene_ply(load_scene_ply(scene_path), path2)
    assert path.read_bytes() == path2.read_bytes()


def test_degree_zero_scene_has_no_rest_properties(tmp_path):
    rng = np.random.default_rng(5)
    scene = random_scene(rng, 2, sh_degree=0)
    path = tmp_path / "dc.ply"
    save_scene_ply(scene, path)
    header = path.read_bytes().split(b"end_header")[0]
    assert b"f_rest_" not in header
    assert load_scene_ply(path).sh_degree == 0


def test_sh_degree_inferred_from_rest_count(tmp_path):
    for degree in range(4):
        rng = np.random.default_rng(degree)
        scene = random_scene(rng, 2, sh_degree=degree)
        path = tmp_path / f"deg{degree}.ply"
        save_scene_ply(scene, path)
        assert load_scene_ply(path).sh_degree == degree


def test_malformed_header_reports_offset(tmp_path):
    path = tmp_path / "bad.ply"
    path.write_bytes(b"not a ply at all")
    with pytest.raises(ParseError) as info:
        load_scene_ply(path)
    assert info.value.offset == 0

    path.write_bytes(b"ply\nformat ascii 1.0\nend_header\n")
    with pytest.raises(ParseError) as info:
        load_scene_ply(path)
    assert info.value.offset == 4  # the format line


def test_missing_property_names_it(tmp_path):
    scene = three_gaussian_fixture()
    path = tmp_path / "ok.ply"
    save_scene_ply(scene, path)
    data = path.read_bytes().replace(b"property float opacity\n", b"")
    broken = tmp_path / "broken.ply"
    broken.write_bytes(data)
    with pytest.raises(SchemaError, match="opacity"):
        load_scene_ply(broken)


def test_truncated_body_raises(tmp_path):
    scene = three_gaussian_fixture()
    path = tmp_path / "full.ply"
    save_scene_ply(scene, path)
    data = path.read_bytes()
    trunc = tmp_path / "trunc.ply"
    trunc.write_bytes(data[:-8])
    with pytest.raises(ParseError):
        load_scene_ply(trunc)


def test_bounds_contain_all_positions():
    scene = three_gaussian_fixture()
    lo, hi = scene.bounds
    assert np.all(scene.positions >= lo - 1e-12)
    assert np.all(scene.positions <= hi + 1e-12)
