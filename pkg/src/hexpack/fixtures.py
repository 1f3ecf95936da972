"""Bundled reference meshes.

Three meshes ship with the package:

- ``pyramid36``: the 36-hex packing of the square pyramid, with the
  prescribed vertex coordinates; its boundary is the 16-quad subdivided
  pyramid pattern.
- ``parity_odd17`` / ``parity_even18``: a pair of meshes of 17 and 18
  hexes enclosing the same 34-quad boundary pattern, i.e. a
  parity-changing template.
"""

from __future__ import annotations

from importlib import resources

from .formats import parse_mesh

FIXTURE_NAMES = ("pyramid36", "parity_odd17", "parity_even18")


def fixture_text(name):
    """Raw document text of a bundled fixture."""
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; have {FIXTURE_NAMES}")
    return (resources.files(__package__) / "data" / f"{name}.hexmesh").read_text()


def load_fixture(name):
    """(HexComplex, coords-or-None) for a bundled fixture."""
    return parse_mesh(fixture_text(name))


def pyramid36():
    """The 36-hex pyramid packing and its 51 vertex coordinate rows."""
    return load_fixture("pyramid36")


def parity_odd17():
    """The 17-hex half of the parity-changing template."""
    return load_fixture("parity_odd17")[0]


def parity_even18():
    """The 18-hex half of the parity-changing template."""
    return load_fixture("parity_even18")[0]
