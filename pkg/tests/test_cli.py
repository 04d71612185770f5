import subprocess
import sys

import numpy as np
import pytest

from edgemorph import build_grid, edgeset_to_image, image_to_edgeset
from edgemorph.cli import run
from edgemorph.fileformats import read_decomposition, read_edges
from edgemorph.pnm import read_pnm, write_pbm, write_pgm


@pytest.fixture
def blob_pbm(tmp_path):
    rng = np.random.default_rng(3)
    img = np.zeros((14, 17), dtype=bool)
    img[2:11, 3:14] = True
    img[rng.random(img.shape) < 0.15] ^= True
    path = tmp_path / "in.pbm"
    path.write_bytes(write_pbm(img))
    return path, img


def read_raster(path):
    return read_pnm(path.read_bytes()).pixels.astype(bool)


def test_skeletonize_then_reconstruct(blob_pbm, tmp_path):
    src, img = blob_pbm
    dec, out = tmp_path / "d.gmskel", tmp_path / "out.pbm"
    assert run(["skeletonize", str(src), "-o", str(dec)]) == 0
    assert run(["reconstruct", str(dec), "-o", str(out), "--k", "0"]) == 0
    g = build_grid(img.shape[1], img.shape[0], 8)
    assert (read_raster(out) == edgeset_to_image(image_to_edgeset(img, g))).all()
    assert read_decomposition(dec.read_text()).sgraph.name == "grid3"


def test_dilate_with_single_is_identity(blob_pbm, tmp_path):
    src, img = blob_pbm
    out = tmp_path / "out.pbm"
    assert run(["dilate", str(src), "-o", str(out), "--sgraph", "single"]) == 0
    assert (read_raster(out) == edgeset_to_image(image_to_edgeset(img, build_grid(17, 14, 8)))).all()


@pytest.mark.parametrize("cmd", [["dilate"], ["erode", "--vacuous", "exclude"], ["close"],
                                 ["open"], ["open", "--opening", "structural"]])
@pytest.mark.parametrize("fmt", ["pbm", "pgm", "edges"])
def test_morphology_commands(cmd, fmt, blob_pbm, tmp_path):
    src, _ = blob_pbm
    out = tmp_path / "out"
    argv = [cmd[0], str(src), "-o", str(out), "--format", fmt, "--sgraph", "square",
            "--connectivity", "4", *cmd[1:]]
    assert run(argv) == 0
    data = out.read_bytes()
    if fmt == "edges":
        assert read_edges(data.decode()).grid == build_grid(17, 14, 4)
    else:
        assert read_pnm(data).pixels.shape == (14, 17)


def test_sgraph_from_file(blob_pbm, tmp_path):
    src, img = blob_pbm
    sg = tmp_path / "line.sg"
    sg.write_text("v 0\nv 1\ne 0 1 rb\n")
    out = tmp_path / "out.pbm"
    assert run(["erode", str(src), "-o", str(out), "--sgraph", str(sg)]) == 0
    bad = tmp_path / "bad.sg"
    bad.write_text("v 0\ne 0 4 r\n")
    assert run(["erode", str(src), "-o", str(out), "--sgraph", str(bad)]) == 2


def test_edge_file_input(blob_pbm, tmp_path):
    src, _ = blob_pbm
    edges, out = tmp_path / "m.gme", tmp_path / "out.pbm"
    assert run(["dilate", str(src), "-o", str(edges), "--format", "edges", "--sgraph", "single"]) == 0
    assert run(["skeletonize", str(edges), "-o", str(tmp_path / "d"), "--sgraph", "square"]) == 0


def test_skeletonize_renders(blob_pbm, tmp_path):
    src, _ = blob_pbm
    render, labels = tmp_path / "s.pbm", tmp_path / "l.pgm"
    assert run(["skeletonize", str(src), "-o", str(tmp_path / "d"), "--render", str(render)]) == 0
    assert read_raster(render).shape == (14, 17)
    assert run(["skeletonize", str(src), "-o", str(tmp_path / "d"), "--render", str(labels),
                "--label-scales", "--max-iter", "2"]) == 0
    assert read_pnm(labels.read_bytes()).kind == "pgm"


def test_distance_commands(blob_pbm, tmp_path):
    src, img = blob_pbm
    dm = tmp_path / "dm.pgm"
    assert run(["distmap", str(src), "-o", str(dm), "--vacuous", "exclude"]) == 0
    values = read_pnm(dm.read_bytes()).pixels
    assert values.shape == img.shape and values.max() <= 2
    sk = tmp_path / "sk.pbm"
    assert run(["skel-dt", str(src), "-o", str(sk), "--variant", "even"]) == 0
    assert not (read_raster(sk) & ~img).any()


def test_classical_roundtrip(blob_pbm, tmp_path):
    src, img = blob_pbm
    layers, out, union = tmp_path / "p.pxskel", tmp_path / "r.pbm", tmp_path / "u.pbm"
    assert run(["classical-skel", str(src), "-o", str(layers), "--se", "cross3",
                "--render", str(union)]) == 0
    assert run(["classical-recon", str(layers), "-o", str(out)]) == 0
    assert (read_raster(out) == img).all()
    assert run(["classical-recon", str(layers), "-o", str(out), "--k", "99"]) == 3


def test_check_connected(tmp_path, capsys):
    a = np.zeros((3, 5), dtype=bool)
    a[1] = True
    b = a.copy()
    b[1, 2] = False
    pa, pb = tmp_path / "a.pbm", tmp_path / "b.pbm"
    pa.write_bytes(write_pbm(a))
    pb.write_bytes(write_pbm(b))
    assert run(["check-connected", str(pa), str(pa)]) == 0
    assert capsys.readouterr().out.strip() == "connected"
    assert run(["check-connected", str(pa), str(pb)]) == 0
    assert capsys.readouterr().out.startswith("not connected")


def test_gray_input_is_thresholded(tmp_path):
    gray = np.array([[0, 200, 200], [0, 200, 90]])
    src, out = tmp_path / "g.pgm", tmp_path / "o.pbm"
    src.write_bytes(write_pgm(gray))
    assert run(["dilate", str(src), "-o", str(out), "--sgraph", "single", "--threshold", "100"]) == 0
    assert read_raster(out).astype(int).tolist() == [[0, 1, 1], [0, 1, 0]]


class TestExitCodes:
    def test_missing_input(self, tmp_path):
        assert run(["dilate", str(tmp_path / "nope.pbm"), "-o", str(tmp_path / "x")]) == 2

    def test_garbage_input(self, tmp_path):
        bad = tmp_path / "bad.pbm"
        bad.write_bytes(b"not an image")
        assert run(["erode", str(bad), "-o", str(tmp_path / "x")]) == 2

    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["dilate", "x"],
                                      ["dilate", "x", "-o", "y", "--connectivity", "6"],
                                      ["reconstruct", "x", "-o", "y", "--k", "-1"]])
    def test_usage(self, argv):
        assert run(argv) == 1

    def test_unknown_sgraph(self, blob_pbm, tmp_path):
        src, _ = blob_pbm
        assert run(["dilate", str(src), "-o", str(tmp_path / "x"), "--sgraph", "hexagon"]) == 1

    def test_k_out_of_range(self, blob_pbm, tmp_path):
        src, _ = blob_pbm
        dec = tmp_path / "d"
        assert run(["skeletonize", str(src), "-o", str(dec)]) == 0
        assert run(["reconstruct", str(dec), "-o", str(tmp_path / "x"), "--k", "500"]) == 3

    def test_failed_run_leaves_no_output(self, tmp_path):
        out = tmp_path / "x"
        run(["dilate", str(tmp_path / "nope.pbm"), "-o", str(out)])
        assert not out.exists()


def test_module_entry_point(blob_pbm, tmp_path):
    src, _ = blob_pbm
    res = subprocess.run([sys.executable, "-m", "edgemorph", "dilate", str(src), "-o",
                          str(tmp_path / "x.pbm"), "--sgraph", "single"], capture_output=True)
    assert res.returncode == 0
