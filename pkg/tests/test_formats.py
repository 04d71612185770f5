import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from edgemorph import EdgeSet, build_grid, builtin, skel_px, skeletonize
from edgemorph.fileformats import (
    FormatError,
    read_decomposition,
    read_edges,
    read_pixel_skeleton,
    write_decomposition,
    write_edges,
    write_pixel_skeleton,
)
from edgemorph.pnm import PNMError, read_pnm, write_pbm, write_pgm

from conftest import random_edgeset

RASTERS = arrays(bool, st.tuples(st.integers(1, 19), st.integers(1, 19)))


class TestPNM:
    def test_ascii_bitmap_with_comments(self):
        data = b"P1\n# made by hand\n3 2 # trailing\n1 0 1\n0 1 0\n"
        img = read_pnm(data)
        assert img.kind == "pbm"
        assert img.pixels.astype(int).tolist() == [[1, 0, 1], [0, 1, 0]]

    def test_ascii_bitmap_digits_may_touch(self):
        assert read_pnm(b"P1 3 1 101").pixels.tolist() == [[True, False, True]]

    def test_packed_bitmap_pads_rows(self):
        data = b"P4\n10 2\n" + bytes([0b10000000, 0b01000000, 0xFF, 0xC0])
        px = read_pnm(data).pixels
        assert px[0].astype(int).tolist() == [1, 0, 0, 0, 0, 0, 0, 0, 0, 1]
        assert px[1].all()

    def test_graymaps(self):
        p2 = read_pnm(b"P2\n2 2\n# c\n10\n0 5\n10 3\n")
        assert p2.maxval == 10 and p2.pixels.tolist() == [[0, 5], [10, 3]]
        p5 = read_pnm(b"P5 2 1 255\n" + bytes([7, 200]))
        assert p5.pixels.tolist() == [[7, 200]]
        assert p5.binary(128).tolist() == [[False, True]]
        wide = read_pnm(b"P5 1 1 1000\n" + (999).to_bytes(2, "big"))
        assert wide.pixels.tolist() == [[999]]

    @pytest.mark.parametrize(
        "data",
        [b"", b"P3\n1 1\n1\n0 0 0", b"P1\n2 2\n1 0 1", b"P4\n9 1\n\x00", b"P2\n1 1\n5\n9",
         b"P5\n0 1\n255\n", b"P1\nx 1\n0"],
    )
    def test_errors(self, data):
        with pytest.raises(PNMError):
            read_pnm(data)

    @settings(max_examples=50)
    @given(RASTERS, st.booleans())
    def test_pbm_roundtrip_is_byte_exact(self, img, binary):
        data = write_pbm(img, binary=binary)
        back = read_pnm(data).pixels
        assert (back == img).all()
        assert write_pbm(back, binary=binary) == data

    @settings(max_examples=50)
    @given(RASTERS, st.booleans(), st.sampled_from([1, 255, 4095]))
    def test_pgm_roundtrip_is_byte_exact(self, mask, binary, maxval):
        values = np.where(mask, maxval, 0)
        data = write_pgm(values, maxval, binary=binary)
        img = read_pnm(data)
        assert img.maxval == maxval and (img.pixels == values).all()
        assert write_pgm(img.pixels, maxval, binary=binary) == data

    def test_pgm_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            write_pgm(np.array([[300]]), 255)


class TestEdgeFile:
    @pytest.mark.parametrize("conn", [4, 8])
    def test_roundtrip(self, conn, rng):
        g = build_grid(6, 4, conn)
        es = random_edgeset(rng, g)
        text = write_edges(es)
        assert text.startswith(f"GME1 6 4 {conn}\n")
        back = read_edges(text)
        assert back == es and write_edges(back) == text

    @pytest.mark.parametrize(
        "text",
        ["", "GME2 3 3 4\n", "GME1 3 3 6\n", "GME1 3 3 4\n0 0 1 1\n", "GME1 3 3 4\n0 0 0\n",
         "GME1 3 3 4\n0 0 0 9\n"],
    )
    def test_errors(self, text):
        with pytest.raises(FormatError):
            read_edges(text)


class TestDecompositionFile:
    @pytest.mark.parametrize("name", ["single", "square", "grid3", "triangle_even"])
    @pytest.mark.parametrize("policy", ["include", "exclude"])
    def test_roundtrip(self, name, policy, rng):
        g = build_grid(7, 6, 8)
        d = skeletonize(random_edgeset(rng, g, 0.8), builtin(name), policy=policy)
        text = write_decomposition(d)
        back = read_decomposition(text)
        assert back.layers == d.layers and back.residue == d.residue
        assert back.termination is d.termination and back.policy is d.policy
        assert back.sgraph == d.sgraph
        assert write_decomposition(back) == text

    def test_empty_decomposition(self):
        d = skeletonize(EdgeSet.empty(build_grid(3, 3, 4)), builtin("square"))
        assert read_decomposition(write_decomposition(d)).depth == 0

    def test_errors(self, rng):
        g = build_grid(5, 5, 8)
        text = write_decomposition(skeletonize(random_edgeset(rng, g, 0.9), builtin("square")))
        broken = [
            text.replace("TERMINATION", "STOP"),
            text.replace("POLICY include", "POLICY sometimes"),
            text.replace("END\n", ""),
            text.replace("LAYER 0", "LAYER 3"),
            "\n".join(text.splitlines()[:2]),
        ]
        for bad in broken:
            with pytest.raises((FormatError, ValueError)):
                read_decomposition(bad)


class TestPixelSkeletonFile:
    @pytest.mark.parametrize("se", ["cross3", "box3"])
    def test_roundtrip(self, se, rng):
        img = rng.random((9, 12)) < 0.7
        skel = skel_px(img, se)
        text = write_pixel_skeleton(skel)
        back = read_pixel_skeleton(text)
        assert back.shape == skel.shape and back.se is skel.se
        assert all((a == b).all() and m == n for (m, a), (n, b) in zip(back, skel))
        assert write_pixel_skeleton(back) == text

    @pytest.mark.parametrize(
        "text", ["", "PXSKEL1 3 3 star\n", "PXSKEL1 3 3 box3\n0 0\n", "PXSKEL1 3 3 box3\nLAYER 1\n",
                 "PXSKEL1 3 3 box3\nLAYER 0\n5 5\n"],
    )
    def test_errors(self, text):
        with pytest.raises(FormatError):
            read_pixel_skeleton(text)
