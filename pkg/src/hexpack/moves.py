"""Local growth moves: gluing one new hex onto the packing surface.

A move glues some nonempty proper subset of the new cube's 6 faces onto
existing surface quads.  Up to cube symmetry there are exactly 8 such
subsets, enumerated here by brute force over the 48 cube isometries.
Every concrete attachment is reachable from the class representative
subset composed with a rotation, so placements only ever mention the
representative: a placement is (config id, glued quad indices, seed
rotation), with quad indices referring to extract_boundary order of the
predecessor packing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InvalidPlacement
from .hexmodel import (
    HEX_FACES,
    HexComplex,
    REF_CORNERS,
    build_complex,
    check_conformity,
    extract_boundary,
    face_key,
    oriented_key,
)
from .surface import SurfacePattern, build_pattern, canonical_code


def _isometries():
    """All 48 corner permutations of the reference cube, with det sign."""
    index = {c: i for i, c in enumerate(REF_CORNERS)}
    out = []
    for axes in itertools.permutations((0, 1, 2)):
        par = 1
        ax = list(axes)
        for i in range(3):
            for j in range(i + 1, 3):
                if ax[i] > ax[j]:
                    par = -par
        for flips in itertools.product((0, 1), repeat=3):
            perm = tuple(
                index[
                    tuple(
                        (1 - c[axes[k]]) if flips[k] else c[axes[k]]
                        for k in range(3)
                    )
                ]
                for c in REF_CORNERS
            )
            out.append((perm, par * (-1) ** sum(flips)))
    return out


def _face_perm(vperm):
    sets = [set(HEX_FACES[f]) for f in range(6)]
    out = []
    for f in range(6):
        img = {vperm[v] for v in HEX_FACES[f]}
        out.append(sets.index(img))
    return tuple(out)


_ISOMETRIES = _isometries()
_FACE_PERMS = tuple(_face_perm(p) for p, _ in _ISOMETRIES)

# Orientation-preserving half, used to align class representatives with
# concrete face subsets.
ROTATIONS = tuple(p for p, d in _ISOMETRIES if d > 0)
ROTATION_FACE_PERMS = tuple(
    _face_perm(p) for p, d in _ISOMETRIES if d > 0
)

_FACE_ADJ = tuple(
    tuple(
        len(set(HEX_FACES[f]) & set(HEX_FACES[g])) == 2 for g in range(6)
    )
    for f in range(6)
)

# _SHARED_EDGE[f][g]: index j such that face g traverses the edge shared
# with face f as (HEX_FACES[g][j], HEX_FACES[g][j+1]).
def _shared_edges():
    table = {}
    for f in range(6):
        for g in range(6):
            if not _FACE_ADJ[f][g]:
                continue
            shared = set(HEX_FACES[f]) & set(HEX_FACES[g])
            gc = HEX_FACES[g]
            for j in range(4):
                if gc[j] in shared and gc[(j + 1) % 4] in shared:
                    table[(f, g)] = j
                    break
    return table


_SHARED_EDGE = _shared_edges()


@dataclass(frozen=True)
class GlueConfig:
    """One symmetry class of glue-face subsets, by representative."""

    id: int
    faces: tuple
    name: str

    @property
    def size(self):
        return len(self.faces)


def _config_name(faces):
    k = len(faces)
    if k == 1:
        return "one"
    if k == 2:
        return "two-adjacent" if _FACE_ADJ[faces[0]][faces[1]] else "two-opposite"
    if k == 3:
        corner = all(
            _FACE_ADJ[a][b] for a, b in itertools.combinations(faces, 2)
        )
        return "three-corner" if corner else "three-row"
    if k == 4:
        comp = tuple(f for f in range(6) if f not in faces)
        return "four-notch" if _FACE_ADJ[comp[0]][comp[1]] else "four-ring"
    return "five"


def _components(faces):
    comps = []
    left = set(faces)
    while left:
        seed = min(left)
        comp = {seed}
        stack = [seed]
        while stack:
            f = stack.pop()
            for g in list(left - comp):
                if _FACE_ADJ[f][g]:
                    comp.add(g)
                    stack.append(g)
        comps.append(tuple(sorted(comp)))
        left -= comp
    return tuple(sorted(comps))


def _build_configs():
    seen = set()
    configs = []
    subsets = sorted(
        (
            tuple(s)
            for k in range(1, 6)
            for s in itertools.combinations(range(6), k)
        ),
        key=lambda s: (len(s), s),
    )
    for s in subsets:
        if s in seen:
            continue
        orbit = {tuple(sorted(fp[f] for f in s)) for fp in _FACE_PERMS}
        seen |= orbit
        configs.append(GlueConfig(len(configs) + 1, s, _config_name(s)))
    return tuple(configs)


_CONFIGS = _build_configs()
_COMPONENTS = {cfg.id: _components(cfg.faces) for cfg in _CONFIGS}


def glue_configs():
    """The 8 glue classes, ordered by (subset size, representative)."""
    return _CONFIGS


def config_by_id(cid):
    if not 1 <= cid <= len(_CONFIGS):
        raise InvalidPlacement(f"no glue config with id {cid}")
    return _CONFIGS[cid - 1]


def config_components(cfg):
    """Face-adjacency components of a config's face set."""
    return _COMPONENTS[cfg.id]


def config_for_subset(subset):
    """Classify a concrete face subset: (config, rotation aligning to it).

    The returned rotation sigma (a corner permutation) maps the config's
    representative faces onto the given subset:
    {sigma_face(f) for f in cfg.faces} == set(subset).
    """
    target = set(subset)
    if not 0 < len(target) < 6:
        raise ValueError(f"not a proper nonempty face subset: {subset}")
    for cfg in _CONFIGS:
        if len(cfg.faces) != len(target):
            continue
        for vperm, fperm in zip(ROTATIONS, ROTATION_FACE_PERMS):
            if {fperm[f] for f in cfg.faces} == target:
                return cfg, vperm
    raise AssertionError(f"face subset {subset} matched no class")


@dataclass(frozen=True)
class Placement:
    """A concrete move: config, glued surface quads, seed rotation.

    quads lists the target quad index for each representative face in
    sorted face order; indices refer to extract_boundary order of the
    packing the placement applies to.  rotation is 0..3, except for the
    two-opposite config where it packs both seeds as r0 + 4*r1.
    """

    config_id: int
    quads: tuple
    rotation: int

    def token(self):
        return f"{self.config_id}:{self.rotation}:" + ",".join(
            str(q) for q in self.quads
        )

    @classmethod
    def from_token(cls, text):
        cid, rot, quads = text.split(":")
        return cls(
            int(cid), tuple(int(q) for q in quads.split(",")), int(rot)
        )

    def sort_key(self):
        return (self.config_id, self.quads, self.rotation)


@dataclass(frozen=True)
class MoveResult:
    """A realized candidate: the placement plus its effect."""

    placement: Placement
    complex: HexComplex
    pattern: SurfacePattern
    code: bytes
    targets: dict


def _euler_of_quads(quads):
    verts = set()
    edges = set()
    for q in quads:
        verts.update(q)
        for i in range(4):
            a, b = q[i], q[(i + 1) % 4]
            edges.add((a, b) if a < b else (b, a))
    return len(verts) - len(edges) + len(quads)


def _propagate(pattern, faces, seeds):
    """Extend seed correspondences across shared cube edges.

    Returns (corner map, face -> quad index) or None on any mismatch.
    """
    m = {}
    targets = {}
    quads = pattern.quads
    directed = pattern.directed_edges
    for f0, t, r in seeds:
        q = quads[t]
        cyc = HEX_FACES[f0]
        for i in range(4):
            c = cyc[i]
            v = q[(r + i) % 4]
            old = m.get(c)
            if old is None:
                m[c] = v
            elif old != v:
                return None
        targets[f0] = t
        stack = [f0]
        while stack:
            f = stack.pop()
            for g in faces:
                if g in targets or not _FACE_ADJ[f][g]:
                    continue
                j = _SHARED_EDGE[(f, g)]
                gc = HEX_FACES[g]
                # face g traverses the shared edge opposite to f, so its
                # target is the unique quad with the reversed directed edge
                hit = directed.get((m[gc[j]], m[gc[(j + 1) % 4]]))
                if hit is None:
                    return None
                qi, pos = hit
                qq = quads[qi]
                for k in range(4):
                    c = gc[(j + k) % 4]
                    v = qq[(pos + k) % 4]
                    old = m.get(c)
                    if old is None:
                        m[c] = v
                    elif old != v:
                        return None
                targets[g] = qi
                stack.append(g)
    if len(targets) != len(faces):
        return None
    return m, targets


def _realize(packing, pattern, cfg, seeds, rotation_code, *, sphere_mode,
             reflection_invariant, with_code):
    """Validate one candidate attachment; None when it is not a legal move."""
    res = _propagate(pattern, cfg.faces, seeds)
    if res is None:
        return None
    m, targets = res
    if len(set(m.values())) != len(m):
        return None  # two cube corners forced onto one surface vertex
    tvals = set(targets.values())
    if len(tvals) != len(targets):
        return None  # two faces glued to the same quad
    # Maximality: an unglued face whose corners are all identified must
    # not coincide orientation-compatibly with a remaining surface quad;
    # that attachment belongs to the larger config.
    for g in range(6):
        if g in targets:
            continue
        gc = HEX_FACES[g]
        if all(c in m for c in gc):
            img = (m[gc[0]], m[gc[1]], m[gc[2]], m[gc[3]])
            for qi in pattern.quads_with_key(face_key(img)):
                if qi not in tvals and oriented_key(
                    pattern.quads[qi]
                ) == oriented_key(img):
                    return None

    new_hex = []
    nxt = packing.vertex_count
    for c in range(8):
        v = m.get(c)
        if v is None:
            v = nxt
            nxt += 1
        new_hex.append(v)
    new_hex = tuple(new_hex)

    succ_quads = [
        q for qi, q in enumerate(pattern.quads) if qi not in tvals
    ]
    for g in range(6):
        if g not in targets:
            succ_quads.append(tuple(new_hex[i] for i in reversed(HEX_FACES[g])))
    if sphere_mode and _euler_of_quads(succ_quads) != 2:
        return None

    c2 = HexComplex(nxt, packing.hexes + (new_hex,))
    if not check_conformity(c2).ok:
        return None
    succ_pattern = build_pattern(succ_quads)
    code = (
        canonical_code(succ_pattern, reflection_invariant) if with_code else b""
    )
    placement = Placement(
        cfg.id, tuple(targets[f] for f in cfg.faces), rotation_code
    )
    return MoveResult(placement, c2, succ_pattern, code, targets)


def _seed_choices(cfg, nquads):
    comps = _COMPONENTS[cfg.id]
    if len(comps) == 1:
        f0 = comps[0][0]
        for t in range(nquads):
            for r in range(4):
                yield ((f0, t, r),), r
    else:
        f0 = comps[0][0]
        f1 = comps[1][0]
        for t0 in range(nquads):
            for r0 in range(4):
                for t1 in range(nquads):
                    if t1 == t0:
                        continue
                    for r1 in range(4):
                        yield ((f0, t0, r0), (f1, t1, r1)), r0 + 4 * r1


def enumerate_moves(packing, pattern=None, allowed=None, *, sphere_mode=True,
                    reflection_invariant=True, dedup_by_successor=True,
                    with_codes=True, counters=None):
    """All legal attachments of one new hex, as MoveResults.

    Results are sorted by (successor code, placement); with
    dedup_by_successor only the first placement per successor code is
    kept.  The pattern argument must be extract_boundary(packing) (it is
    computed when omitted).  counters, if given, is a dict whose "tried"
    entry is incremented per candidate seeding examined.

    with_codes=False skips successor code computation (result .code is
    b"", order falls back to placement alone); it only combines with
    dedup_by_successor=False since dedup needs the codes.
    """
    if dedup_by_successor and not with_codes:
        raise ValueError("dedup_by_successor requires with_codes")
    if pattern is None:
        pattern = extract_boundary(packing)
    nquads = len(pattern.quads)
    out = []
    for cfg in _CONFIGS:
        if allowed is not None and cfg.id not in allowed:
            continue
        if sphere_mode and len(_COMPONENTS[cfg.id]) > 1:
            # gluing two disjoint quads of one sphere always adds a handle
            continue
        for seeds, rot in _seed_choices(cfg, nquads):
            if counters is not None:
                counters["tried"] = counters.get("tried", 0) + 1
            cand = _realize(
                packing,
                pattern,
                cfg,
                seeds,
                rot,
                sphere_mode=sphere_mode,
                reflection_invariant=reflection_invariant,
                with_code=with_codes,
            )
            if cand is not None:
                out.append(cand)
    out.sort(key=lambda c: (c.code, c.placement.sort_key()))
    if not dedup_by_successor:
        return out
    kept = []
    seen = set()
    for cand in out:
        if cand.code not in seen:
            seen.add(cand.code)
            kept.append(cand)
    return kept


def enumerate_placements(packing, pattern=None, allowed=None, *,
                         sphere_mode=True, reflection_invariant=True,
                         dedup_by_successor=True):
    """Like enumerate_moves but returning only the Placement objects."""
    return [
        c.placement
        for c in enumerate_moves(
            packing,
            pattern,
            allowed,
            sphere_mode=sphere_mode,
            reflection_invariant=reflection_invariant,
            dedup_by_successor=dedup_by_successor,
        )
    ]


def apply_move(packing, placement, pattern=None):
    """Apply a placement; returns (new complex, new surface pattern).

    Raises InvalidPlacement when the placement does not decode against
    the packing (stale indices, failed identification, nonconforming
    result).  The returned pattern equals the boundary of the returned
    complex as a set of cycles; its quad order is the local revision
    order, not extract_boundary order.
    """
    if pattern is None:
        pattern = extract_boundary(packing)
    cfg = config_by_id(placement.config_id)
    comps = _COMPONENTS[cfg.id]
    if len(placement.quads) != len(cfg.faces):
        raise InvalidPlacement(
            f"expected {len(cfg.faces)} glued quads, got {len(placement.quads)}"
        )
    nquads = len(pattern.quads)
    if any(not 0 <= q < nquads for q in placement.quads):
        raise InvalidPlacement("glued quad index out of range")
    rot_limit = 4 if len(comps) == 1 else 16
    if not 0 <= placement.rotation < rot_limit:
        raise InvalidPlacement(f"rotation {placement.rotation} out of range")
    by_face = dict(zip(cfg.faces, placement.quads))
    if len(comps) == 1:
        seeds = ((comps[0][0], by_face[comps[0][0]], placement.rotation),)
    else:
        seeds = (
            (comps[0][0], by_face[comps[0][0]], placement.rotation % 4),
            (comps[1][0], by_face[comps[1][0]], placement.rotation // 4),
        )
    cand = _realize(
        packing,
        pattern,
        cfg,
        seeds,
        placement.rotation,
        sphere_mode=False,
        reflection_invariant=True,
        with_code=False,
    )
    if cand is None or cand.placement.quads != placement.quads:
        raise InvalidPlacement(
            f"placement {placement.token()} does not fit this packing"
        )
    return cand.complex, cand.pattern


def initial_packing():
    """The single-hex start state of every search."""
    return build_complex([tuple(range(8))], 8)
