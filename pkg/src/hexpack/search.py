"""Layered minimum-count search over canonical surface patterns.

Packings grow one hex at a time from the single-hex start.  States are
deduplicated by the canonical code of their boundary pattern; for each
code the ledger keeps, per parity of the hex count, the smallest count
reaching it plus one witness (the move sequence).  Expansion is layer
synchronous and merged in a deterministic order, so results do not
depend on thread count, and the ledger can be checkpointed at layer
boundaries and resumed losslessly.

A record's packing is reconstructed from its witness when the record's
layer is expanded; packings other than the retained witness are not
re-expanded, matching the keep-one-optimal-packing-per-pattern policy.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import CheckpointCorrupt, VersionMismatch
from .hexmodel import (
    HEX_FACES,
    HexComplex,
    check_conformity,
    extract_boundary,
    face_key,
    hex_face_cycle,
    hex_parity,
)
from .moves import (
    ROTATION_FACE_PERMS,
    ROTATIONS,
    Placement,
    apply_move,
    config_components,
    config_for_subset,
    enumerate_moves,
    glue_configs,
    initial_packing,
)
from .surface import canonical_code, code_quad_count

FORMAT_VERSION = 1
CODE_LAYOUT_VERSION = 1

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class SearchOptions:
    """Knobs of the layered search.

    admissible_pruning only applies when a target code is set: states
    needing more than the remaining budget of moves to reach the target
    quad count (|dF| <= 4 per move) are not expanded.
    """

    sphere_mode: bool = True
    reflection_invariant: bool = True
    allowed_configs: tuple = tuple(cfg.id for cfg in glue_configs())
    checkpoint_dir: str = None
    thread_count: int = 1
    admissible_pruning: bool = True


@dataclass
class SearchStats:
    states_expanded: int = 0
    moves_tried: int = 0
    moves_valid: int = 0
    pruned: int = 0

    def as_dict(self):
        return {
            "states_expanded": self.states_expanded,
            "moves_tried": self.moves_tried,
            "moves_valid": self.moves_valid,
            "pruned": self.pruned,
        }


@dataclass
class PatternRecord:
    """Minimal hex counts per parity for one canonical code."""

    code: bytes
    min_odd: int = None
    min_even: int = None
    witness_odd: tuple = None
    witness_even: tuple = None

    def slot(self, parity):
        return self.min_odd if parity == "odd" else self.min_even

    def witness(self, parity):
        return self.witness_odd if parity == "odd" else self.witness_even

    def set_slot(self, parity, count, witness):
        if parity == "odd":
            self.min_odd, self.witness_odd = count, witness
        else:
            self.min_even, self.witness_even = count, witness

    @property
    def quad_count(self):
        return code_quad_count(self.code)


@dataclass
class SearchLedger:
    records: dict
    layer: int
    options: SearchOptions
    stats: SearchStats = field(default_factory=SearchStats)


@dataclass(frozen=True)
class SearchResult:
    found: bool
    count: int
    witness: tuple
    exhausted: bool
    ledger: SearchLedger


@dataclass(frozen=True)
class TemplateHit:
    code: bytes
    odd_count: int
    even_count: int
    odd_witness: tuple
    even_witness: tuple


@dataclass(frozen=True)
class TemplateReport:
    report_a: object
    report_b: object
    code_a: bytes
    code_b: bytes
    codes_equal: bool
    count_a: int
    count_b: int
    parity_a: str
    parity_b: str
    parity_changing: bool


@dataclass(frozen=True)
class GrowOrderResult:
    found: bool
    order: tuple
    witness: tuple
    nodes: int
    reason: str = None


def _parity_word(n):
    return "odd" if n % 2 else "even"


def replay_witness(witness):
    """Rebuild a packing from the single-hex start; validates every step."""
    c = initial_packing()
    for pl in witness:
        c, _ = apply_move(c, pl)
    return c


def _fresh_ledger(options):
    start = initial_packing()
    code = canonical_code(
        extract_boundary(start), options.reflection_invariant
    )
    rec = PatternRecord(code, min_odd=1, witness_odd=())
    return SearchLedger(records={code: rec}, layer=1, options=options)


def _expand_record(args):
    code, witness, options = args
    packing = replay_witness(witness)
    pattern = extract_boundary(packing)
    counters = {"tried": 0}
    cands = enumerate_moves(
        packing,
        pattern,
        set(options.allowed_configs),
        sphere_mode=options.sphere_mode,
        reflection_invariant=options.reflection_invariant,
        dedup_by_successor=True,
        counters=counters,
    )
    return [
        (cand.code, code, cand.placement) for cand in cands
    ], counters["tried"]


def build_ledger(max_hexes, options=None, target=None, progress=None):
    """Run the layered search up to max_hexes; returns the ledger.

    With a target code the loop additionally stops at the first layer
    containing the target and, when admissible_pruning is on, skips
    states that cannot reach the target's quad count in the remaining
    budget.  A checkpoint directory in the options makes the run
    resumable: an existing checkpoint is loaded and continued.
    """
    if options is None:
        options = SearchOptions()
    if max_hexes < 1:
        raise ValueError("max_hexes must be at least 1")

    ledger = None
    if options.checkpoint_dir and os.path.exists(
        os.path.join(options.checkpoint_dir, MANIFEST_NAME)
    ):
        ledger = load_checkpoint(options.checkpoint_dir)
        for name in ("sphere_mode", "reflection_invariant", "allowed_configs"):
            if getattr(ledger.options, name) != getattr(options, name):
                raise CheckpointCorrupt(
                    f"checkpoint was written with different {name}"
                )
        ledger.options = options
    if ledger is None:
        ledger = _fresh_ledger(options)
        if options.checkpoint_dir:
            save_checkpoint(ledger, options.checkpoint_dir)

    target_quads = code_quad_count(target) if target is not None else None

    while ledger.layer < max_hexes:
        layer = ledger.layer
        if target is not None and any(
            rec.slot(p) is not None
            for rec in (ledger.records.get(target),)
            if rec is not None
            for p in ("odd", "even")
        ):
            break
        parity = _parity_word(layer)
        frontier = [
            (code, rec)
            for code, rec in sorted(ledger.records.items())
            if rec.slot(parity) == layer
        ]
        work = []
        for code, rec in frontier:
            if (
                target is not None
                and options.admissible_pruning
                and -(-abs(target_quads - rec.quad_count) // 4)
                > max_hexes - layer
            ):
                ledger.stats.pruned += 1
                continue
            work.append((code, rec.witness(parity), options))

        if options.thread_count > 1 and len(work) > 1:
            with ThreadPoolExecutor(max_workers=options.thread_count) as pool:
                results = list(pool.map(_expand_record, work))
        else:
            results = [_expand_record(w) for w in work]

        proposals = []
        for plist, tried in results:
            proposals.extend(plist)
            ledger.stats.moves_tried += tried
            ledger.stats.moves_valid += len(plist)
        ledger.stats.states_expanded += len(work)

        next_parity = _parity_word(layer + 1)
        proposals.sort(key=lambda t: (t[0], t[1], t[2].sort_key()))
        pred_witness = {code: wit for code, wit, _ in work}
        for succ_code, pred_code, placement in proposals:
            rec = ledger.records.get(succ_code)
            if rec is None:
                rec = PatternRecord(succ_code)
                ledger.records[succ_code] = rec
            if rec.slot(next_parity) is None:
                rec.set_slot(
                    next_parity,
                    layer + 1,
                    pred_witness[pred_code] + (placement,),
                )
        ledger.layer = layer + 1
        if options.checkpoint_dir:
            save_checkpoint(ledger, options.checkpoint_dir)
        if progress is not None:
            progress(ledger)
        if target is not None and target in ledger.records:
            rec = ledger.records[target]
            if rec.min_odd is not None or rec.min_even is not None:
                break
    return ledger


def search_min_packing(target, max_hexes, options=None):
    """Minimum-hex packing whose boundary has the target canonical code.

    target may be a SurfacePattern or a code (bytes).  Returns a
    SearchResult; exhausted=True means max_hexes was reached without
    finding the target.
    """
    if options is None:
        options = SearchOptions()
    if not isinstance(target, (bytes, bytearray)):
        target = canonical_code(target, options.reflection_invariant)
    target = bytes(target)
    ledger = build_ledger(max_hexes, options, target=target)
    rec = ledger.records.get(target)
    counts = []
    if rec is not None:
        for p in ("odd", "even"):
            if rec.slot(p) is not None:
                counts.append((rec.slot(p), rec.witness(p)))
    if counts:
        count, witness = min(counts)
        return SearchResult(True, count, witness, False, ledger)
    return SearchResult(False, None, None, True, ledger)


def find_templates(max_hexes, options=None):
    """Codes reached with both parities within max_hexes, with witnesses.

    Each emitted hit is verified by replaying both witnesses and
    re-extracting the boundary codes.
    """
    if options is None:
        options = SearchOptions()
    ledger = build_ledger(max_hexes, options)
    hits = []
    for code, rec in sorted(ledger.records.items()):
        if rec.min_odd is None or rec.min_even is None:
            continue
        for parity in ("odd", "even"):
            packing = replay_witness(rec.witness(parity))
            assert len(packing.hexes) == rec.slot(parity)
            got = canonical_code(
                extract_boundary(packing), options.reflection_invariant
            )
            assert got == code, "witness does not reproduce its code"
        hits.append(
            TemplateHit(
                code,
                rec.min_odd,
                rec.min_even,
                rec.witness_odd,
                rec.witness_even,
            )
        )
    hits.sort(key=lambda h: (max(h.odd_count, h.even_count), h.code))
    return tuple(hits)


def verify_template(a, b, reflection_invariant=True):
    """Compare two complexes as a candidate template pair."""
    rep_a = check_conformity(a)
    rep_b = check_conformity(b)
    code_a = code_b = None
    if rep_a.ok:
        code_a = canonical_code(extract_boundary(a), reflection_invariant)
    if rep_b.ok:
        code_b = canonical_code(extract_boundary(b), reflection_invariant)
    codes_equal = code_a is not None and code_a == code_b
    pa, pb = hex_parity(a), hex_parity(b)
    return TemplateReport(
        report_a=rep_a,
        report_b=rep_b,
        code_a=code_a,
        code_b=code_b,
        codes_equal=codes_equal,
        count_a=len(a.hexes),
        count_b=len(b.hexes),
        parity_a=pa,
        parity_b=pb,
        parity_changing=bool(codes_equal and pa != pb),
    )


def _boundary_key_set(c):
    keys = {}
    for hi, corners in enumerate(c.hexes):
        for f in range(6):
            k = face_key(hex_face_cycle(corners, f))
            keys[k] = keys.get(k, 0) + 1
    return {k for k, n in keys.items() if n == 1}


def _euler_of_complex_boundary(c):
    quads = c.boundary_quads()
    verts = {v for q in quads for v in q}
    edges = {
        (q[i], q[(i + 1) % 4]) if q[i] < q[(i + 1) % 4] else (q[(i + 1) % 4], q[i])
        for q in quads
        for i in range(4)
    }
    return len(verts) - len(edges) + len(quads)


def find_grow_order(c, options=None):
    """Find an order of c's hexes that is a legal move sequence.

    Backtracks over prefixes (memoizing failed hex sets); on success the
    ordering is converted to a witness replaying to a packing whose
    boundary code equals c's.  Returns GrowOrderResult with found=False
    and a reason when no order exists under the configured move rules.
    """
    if options is None:
        options = SearchOptions()
    n = len(c.hexes)
    if n == 0:
        return GrowOrderResult(False, None, None, 0, "empty complex")
    if not check_conformity(c).ok:
        return GrowOrderResult(False, None, None, 0, "input complex not conforming")

    hex_keys = [
        tuple(face_key(c.hex_face(hi, f)) for f in range(6)) for hi in range(n)
    ]
    allowed = set(options.allowed_configs)
    failed = set()
    nodes = 0

    def extend(prefix, chosen):
        nonlocal nodes
        nodes += 1
        if len(prefix) == n:
            return prefix
        if chosen in failed:
            return None
        sub = HexComplex(
            c.vertex_count, tuple(c.hexes[i] for i in prefix)
        )
        bkeys = _boundary_key_set(sub)
        cands = []
        for h in range(n):
            if h in chosen:
                continue
            glued = tuple(
                f for f in range(6) if hex_keys[h][f] in bkeys
            )
            if 1 <= len(glued) <= 5:
                cands.append((-len(glued), h, glued))
        for _, h, glued in sorted(cands):
            cfg, _ = config_for_subset(glued)
            if cfg.id not in allowed:
                continue
            grown = HexComplex(
                c.vertex_count, sub.hexes + (c.hexes[h],)
            )
            if not check_conformity(grown).ok:
                continue
            if options.sphere_mode and _euler_of_complex_boundary(grown) != 2:
                continue
            res = extend(prefix + (h,), chosen | {h})
            if res is not None:
                return res
        failed.add(chosen)
        return None

    order = None
    for h0 in range(n):
        order = extend((h0,), frozenset((h0,)))
        if order is not None:
            break
    if order is None:
        return GrowOrderResult(
            False, None, None, nodes, "no grow order under the move rules"
        )
    witness = _order_to_witness(c, order)
    return GrowOrderResult(True, order, witness, nodes)


def _order_to_witness(c, order):
    """Convert a valid hex ordering into a placement sequence."""
    replay = initial_packing()
    pattern = extract_boundary(replay)
    first = c.hexes[order[0]]
    vmap = {first[i]: i for i in range(8)}
    witness = []
    for hi in order[1:]:
        corners = c.hexes[hi]
        key_to_idx = {face_key(q): qi for qi, q in enumerate(pattern.quads)}
        actual = []
        img_key = {}
        for f in range(6):
            cyc = hex_face_cycle(corners, f)
            if any(v not in vmap for v in cyc):
                continue
            k = face_key(tuple(vmap[v] for v in cyc))
            if k in key_to_idx:
                actual.append(f)
                img_key[f] = k
        cfg, sigma = config_for_subset(tuple(actual))
        fperm = ROTATION_FACE_PERMS[ROTATIONS.index(sigma)]
        quads = tuple(key_to_idx[img_key[fperm[f]]] for f in cfg.faces)
        rots = []
        for comp in config_components(cfg):
            f0 = comp[0]
            target = pattern.quads[key_to_idx[img_key[fperm[f0]]]]
            imgs = [vmap[corners[sigma[v]]] for v in HEX_FACES[f0]]
            r = target.index(imgs[0])
            if any(target[(r + i) % 4] != imgs[i] for i in range(4)):
                raise AssertionError("glued face does not align with its quad")
            rots.append(r)
        rotation = rots[0] if len(rots) == 1 else rots[0] + 4 * rots[1]
        pl = Placement(cfg.id, quads, rotation)
        replay, _ = apply_move(replay, pl, pattern)
        new_hex = replay.hexes[-1]
        for ci in range(8):
            ov = corners[sigma[ci]]
            if ov in vmap:
                if vmap[ov] != new_hex[ci]:
                    raise AssertionError("vertex map mismatch during replay")
            else:
                vmap[ov] = new_hex[ci]
        witness.append(pl)
        pattern = extract_boundary(replay)
    return tuple(witness)


def _options_to_json(options):
    return {
        "sphere_mode": options.sphere_mode,
        "reflection_invariant": options.reflection_invariant,
        "allowed_configs": list(options.allowed_configs),
        "thread_count": options.thread_count,
        "admissible_pruning": options.admissible_pruning,
    }


def _options_from_json(data, checkpoint_dir):
    try:
        return SearchOptions(
            sphere_mode=bool(data["sphere_mode"]),
            reflection_invariant=bool(data["reflection_invariant"]),
            allowed_configs=tuple(int(x) for x in data["allowed_configs"]),
            checkpoint_dir=checkpoint_dir,
            thread_count=int(data.get("thread_count", 1)),
            admissible_pruning=bool(data.get("admissible_pruning", True)),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise CheckpointCorrupt(f"bad options in manifest: {err}") from None


def _layer_file(n):
    return f"layer_{n:03d}.records"


def _write_atomic(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def save_checkpoint(ledger, directory=None):
    """Write the ledger as manifest + per-layer record files.

    Layer file n holds every record slot first written at layer n, one
    line each: code hex, parity word, count, semicolon-joined placement
    tokens ('-' when empty).  The manifest is written last, so a
    checkpoint is valid iff its manifest is.
    """
    if directory is None:
        directory = ledger.options.checkpoint_dir
    if not directory:
        raise ValueError("no checkpoint directory")
    os.makedirs(directory, exist_ok=True)
    by_layer = {}
    for code, rec in sorted(ledger.records.items()):
        for parity in ("odd", "even"):
            count = rec.slot(parity)
            if count is not None:
                by_layer.setdefault(count, []).append((code, parity, rec))
    files = []
    for n in range(1, ledger.layer + 1):
        name = _layer_file(n)
        files.append(name)
        path = os.path.join(directory, name)
        if os.path.exists(path) and n < ledger.layer:
            continue  # layer files are immutable once their layer is done
        lines = []
        for code, parity, rec in by_layer.get(n, ()):
            wit = rec.witness(parity)
            tokens = ";".join(pl.token() for pl in wit) if wit else "-"
            lines.append(f"{code.hex()} {parity} {n} {tokens}")
        _write_atomic(path, "\n".join(lines) + ("\n" if lines else ""))
    manifest = {
        "format_version": FORMAT_VERSION,
        "code_layout_version": CODE_LAYOUT_VERSION,
        "layer": ledger.layer,
        "options": _options_to_json(ledger.options),
        "stats": ledger.stats.as_dict(),
        "files": files,
    }
    _write_atomic(
        os.path.join(directory, MANIFEST_NAME),
        json.dumps(manifest, indent=1, sort_keys=True) + "\n",
    )


def load_checkpoint(directory):
    """Read a checkpoint back into a SearchLedger; validates a sample."""
    path = os.path.join(directory, MANIFEST_NAME)
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise CheckpointCorrupt(f"no manifest in {directory}") from None
    except json.JSONDecodeError as err:
        raise CheckpointCorrupt(f"manifest is not valid JSON: {err}") from None
    if manifest.get("format_version") != FORMAT_VERSION:
        raise VersionMismatch(
            f"checkpoint format {manifest.get('format_version')!r}, "
            f"expected {FORMAT_VERSION}"
        )
    if manifest.get("code_layout_version") != CODE_LAYOUT_VERSION:
        raise VersionMismatch(
            f"code layout {manifest.get('code_layout_version')!r}, "
            f"expected {CODE_LAYOUT_VERSION}"
        )
    options = _options_from_json(manifest.get("options", {}), directory)
    try:
        layer = int(manifest["layer"])
        files = list(manifest["files"])
    except (KeyError, TypeError, ValueError) as err:
        raise CheckpointCorrupt(f"bad manifest: {err}") from None
    if len(files) != layer:
        raise CheckpointCorrupt(
            f"manifest lists {len(files)} layer files for layer {layer}"
        )
    records = {}
    for n, name in enumerate(files, start=1):
        try:
            with open(os.path.join(directory, name)) as fh:
                text = fh.read()
        except FileNotFoundError:
            raise CheckpointCorrupt(f"missing layer file {name}") from None
        for lineno, line in enumerate(text.splitlines(), start=1):
            parts = line.split()
            if len(parts) != 4:
                raise CheckpointCorrupt(f"{name}:{lineno}: malformed record line")
            code_hex, parity, count_s, tokens = parts
            try:
                code = bytes.fromhex(code_hex)
                count = int(count_s)
            except ValueError:
                raise CheckpointCorrupt(
                    f"{name}:{lineno}: bad code or count"
                ) from None
            if parity not in ("odd", "even") or _parity_word(count) != parity:
                raise CheckpointCorrupt(
                    f"{name}:{lineno}: parity does not match count"
                )
            if count != n:
                raise CheckpointCorrupt(
                    f"{name}:{lineno}: count {count} in layer-{n} file"
                )
            if tokens == "-":
                witness = ()
            else:
                try:
                    witness = tuple(
                        Placement.from_token(t) for t in tokens.split(";")
                    )
                except ValueError:
                    raise CheckpointCorrupt(
                        f"{name}:{lineno}: bad placement token"
                    ) from None
            if len(witness) != count - 1:
                raise CheckpointCorrupt(
                    f"{name}:{lineno}: witness length {len(witness)} "
                    f"for count {count}"
                )
            rec = records.get(code)
            if rec is None:
                rec = PatternRecord(code)
                records[code] = rec
            if rec.slot(parity) is not None:
                raise CheckpointCorrupt(
                    f"{name}:{lineno}: duplicate {parity} slot for {code_hex}"
                )
            rec.set_slot(parity, count, witness)
    stats_d = manifest.get("stats", {})
    stats = SearchStats(
        states_expanded=int(stats_d.get("states_expanded", 0)),
        moves_tried=int(stats_d.get("moves_tried", 0)),
        moves_valid=int(stats_d.get("moves_valid", 0)),
        pruned=int(stats_d.get("pruned", 0)),
    )
    ledger = SearchLedger(records=records, layer=layer, options=options, stats=stats)

    sample = [rec for _, rec in sorted(records.items())][:3]
    for rec in sample:
        for parity in ("odd", "even"):
            if rec.slot(parity) is None:
                continue
            packing = replay_witness(rec.witness(parity))
            got = canonical_code(
                extract_boundary(packing), options.reflection_invariant
            )
            if got != rec.code or len(packing.hexes) != rec.slot(parity):
                raise CheckpointCorrupt(
                    f"record {rec.code.hex()} does not replay to its code"
                )
    return ledger
