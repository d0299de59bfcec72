"""Command-line front end: spec loading, analysis runs and report writing."""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
from gmpy2 import mpq

from . import dims, presets
from .field import FieldError, NumberField, Q, literal, to_float
from .finite_type import attach_aliases, detect_finite_type
from .ifs import DEFAULT_WORD_BUDGET, BudgetExceeded, IFSError, WeightedIFS
from .net import NetTree
from .oracle import MoranMeasure, Override, moran_mu_ball
from .separation import awsc_bound_check, gap_report, wsc_verdict

SUBCOMMANDS = ("analyze", "net-tree", "separation", "finite-type", "dims", "hdelta", "checks")

CLAIMS = {
    "exact": "rational or field values computed without rounding; hold at the stated depth",
    "certified": "two-sided oracle bounds or lower bounds that hold for the true measure",
    "trend": "finite-window behaviour of a limit quantity; never a proof of the limit",
    "estimate": "finite-depth stand-in for a sup or liminf; labelled with its depth",
}


class SpecError(ValueError):
    pass


# ---------------------------------------------------------------- spec loading

_LITERAL = {"anyOf": [{"type": "string"}, {"type": "integer"}, {"type": "array", "items": {"anyOf": [{"type": "string"}, {"type": "integer"}]}}]}

IFS_SCHEMA = {
    "type": "object",
    "required": ["maps", "probs"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "field": {
            "type": "object",
            "required": ["min_poly", "root_interval"],
            "additionalProperties": False,
            "properties": {
                "min_poly": {"type": "array", "items": {"type": "integer"}, "minItems": 2},
                "root_interval": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
            },
        },
        "maps": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "object",
                "required": ["r", "d"],
                "additionalProperties": False,
                "properties": {"r": _LITERAL, "d": _LITERAL},
            },
        },
        "probs": {"type": "array", "items": {"anyOf": [{"type": "string"}, {"type": "integer"}]}},
    },
}

MORAN_SCHEMA = {
    "type": "object",
    "required": ["moran"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "moran": {
            "type": "object",
            "required": ["default"],
            "additionalProperties": False,
            "properties": {
                "default": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                "overrides": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["index_rule", "pair"],
                        "additionalProperties": False,
                        "properties": {
                            "index_rule": {"type": "string"},
                            "pair": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                        },
                    },
                },
            },
        },
    },
}


class _FloatLiteral(str):
    pass


def _find_floats(node, path="") -> list[str]:
    if isinstance(node, _FloatLiteral):
        return [f"{path or '<root>'}: float literal {str(node)} rejected; write it as an exact string such as \"1/3\""]
    if isinstance(node, dict):
        return [m for k, v in node.items() for m in _find_floats(v, f"{path}.{k}" if path else k)]
    if isinstance(node, list):
        return [m for i, v in enumerate(node) for m in _find_floats(v, f"{path}[{i}]")]
    return []


def parse_spec_text(text: str, source: str = "<spec>") -> dict:
    try:
        doc = json.loads(text, parse_float=_FloatLiteral)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    floats = _find_floats(doc)
    if floats:
        raise SpecError(f"{source}: " + "; ".join(floats))
    return doc


def build_measure(doc: dict, name: str | None = None):
    """WeightedIFS or MoranMeasure from a parsed spec document."""
    if not isinstance(doc, dict):
        raise SpecError("spec must be a JSON object")
    schema = MORAN_SCHEMA if "moran" in doc else IFS_SCHEMA
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SpecError(f"{where}: {exc.message}") from exc
    name = doc.get("name", name)
    try:
        if "moran" in doc:
            m = doc["moran"]
            overrides = [Override(o["index_rule"], tuple(o["pair"])) for o in m.get("overrides", [])]
            for o in overrides:
                o.applies(1)  # surfaces unknown rules here
            return MoranMeasure(tuple(m["default"]), overrides, name)
        fld = NumberField()
        if "field" in doc:
            f = doc["field"]
            fld = NumberField(f["min_poly"], tuple(Q(v) for v in f["root_interval"]))
        return WeightedIFS(
            [mp["r"] for mp in doc["maps"]],
            [mp["d"] for mp in doc["maps"]],
            doc["probs"],
            field=fld,
            name=name,
        )
    except (FieldError, IFSError, ValueError) as exc:
        raise SpecError(str(exc)) from exc


def load_spec(path: str | Path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {p}: {exc.strerror}") from exc
    return build_measure(parse_spec_text(text, str(p)), name=p.stem)


def load_preset(name: str):
    if name not in presets.PRESETS:
        raise SpecError(f"unknown preset {name!r}; choose from {', '.join(presets.preset_names())}")
    return build_measure(presets.PRESETS[name], name=name)


# ---------------------------------------------------------------- configuration


@dataclass
class AnalysisConfig:
    command: str
    preset: str | None = None
    spec: str | None = None
    depth: int = 12
    word_budget: int = DEFAULT_WORD_BUDGET
    state_budget: int = 20000
    q_grid: tuple = (1.05, 1.2, 2.0)
    delta_grid: tuple = (1.0, 0.5)
    fmt: str = "csv"
    out: str = "report"
    seed: int = 0
    random_witnesses: int = 0
    emit: str | None = None
    argv: tuple = ()

    def validate(self) -> None:
        if (self.preset is None) == (self.spec is None):
            raise SpecError("give exactly one of --preset or --spec")
        if self.depth < 1:
            raise SpecError("--depth must be at least 1")
        if self.word_budget < 1 or self.state_budget < 1:
            raise SpecError("budgets must be at least 1")
        if any(q <= 1 for q in self.q_grid):
            raise SpecError("--q values must exceed 1 (the q = 1 doubling row is always included)")
        if any(d <= 0 for d in self.delta_grid):
            raise SpecError("--delta values must be positive")

    @property
    def label(self) -> str:
        return self.preset or Path(self.spec).stem


# ---------------------------------------------------------------- report bundle


@dataclass
class Bundle:
    config: AnalysisConfig
    summary: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    files: dict = field(default_factory=dict)  # extra JSON documents
    partial: list = field(default_factory=list)

    def table(self, name: str, header: list, rows: list) -> None:
        self.tables[name] = (header, rows)


def _f(x) -> float:
    if isinstance(x, float):
        return x
    try:
        return float(to_float(x)[0])
    except OverflowError:
        return dims.safe_exp(dims.log_exact(x))


def _s(x) -> Any:
    return literal(x)


def _cell(x) -> str:
    v = literal(x)
    return json.dumps(v) if isinstance(v, list) else str(v)


def _cap(config: AnalysisConfig, cap: int) -> int:
    return min(config.depth, cap)


# ------------------------------------------------------------ sections


def section_net_tree(ifs, tree, config: AnalysisConfig, bundle: Bundle) -> None:
    depth = _cap(config, 8)
    rows = []
    for n in range(depth + 1):
        for d in tree.level(n):
            rows.append([n, _cell(d.left), _cell(d.right), _f(d.length), str(d.p_n), len(d.neighbors), int(d.is_gap)])
    bundle.table("net_tree", ["level", "left", "right", "length_float", "P_n", "neighbor_count", "is_gap"], rows)
    bundle.summary["net_tree"] = {
        "depth": depth,
        "intervals_per_level": [len(tree.level(n)) for n in range(depth + 1)],
        "claim": "exact",
    }


def section_finite_type(ifs, tree, config: AnalysisConfig, bundle: Bundle):
    graph = detect_finite_type(tree, max_levels=12)
    if config.preset in presets.ALIASES:
        attach_aliases(graph, presets.ALIASES[config.preset])
    doc = graph.to_json()
    bundle.files["finite_type_graph"] = doc
    bundle.summary["finite_type"] = {
        "closed": graph.closed,
        "closure_level": graph.closure_level,
        "vertices": len(graph),
        "labels": [graph.label(i) for i in range(len(graph))],
        "growth": list(graph.growth),
        "claim": "exact" if graph.closed else "trend",
    }
    if config.emit:
        Path(config.emit).parent.mkdir(parents=True, exist_ok=True)
        Path(config.emit).write_text(_dumps(doc))
    return graph


def section_separation(ifs, tree, graph, config: AnalysisConfig, bundle: Bundle):
    depth = _cap(config, 12)
    try:
        rep = gap_report(ifs, tree, depth, graph if graph is not None and graph.closed else None, config.word_budget)
    except BudgetExceeded as exc:
        rep = exc.partial
        bundle.partial.append(f"separation: {exc} (levels 1..{rep.depth if rep else 0} kept)")
        if rep is None or rep.depth == 0:
            return None
    rows = [[r[k] if not isinstance(r[k], list) else json.dumps(r[k]) for k in r] for r in rep.rows()]
    bundle.table("separation", ["n", "a_n", "f_n", "kappa_n", "g_n", "awsc_bound", "margin"], rows)
    summary: dict = {"depth": rep.depth, "claim": "exact"}
    if rep.depth >= 3:
        v = wsc_verdict(rep)
        summary["wsc"] = v.describe()
    summary["awsc_bound_holds"] = all(ok for ok, _ in awsc_bound_check(rep))
    bundle.summary["separation"] = summary
    return rep


def section_dims(ifs, tree, graph, config: AnalysisConfig, bundle: Bundle):
    depth = config.depth
    ed = dims.endpoint_dims(ifs, tree, depth)
    rows = []
    for side, seq, geo in (("0", ed.p0, ed.geometric0), ("1", ed.p1, ed.geometric1)):
        for n, v in enumerate(seq, start=1):
            rows.append([side, n, str(v), _f(v), "geometric" if geo else "running-min"])
    bundle.table("endpoint", ["x", "n", "value_exact", "value_float", "verdict"], rows)
    n_max = _cap(config, 10)
    qres = dims.q_sequence(tree, n_max, graph, config.state_budget, depth=_cap(config, 7))
    verdict = "exact" if qres.exact else "lower-bound"
    bundle.table(
        "q_sequence",
        ["n", "value_exact", "value_float", "verdict"],
        [[n, str(v), _f(v), verdict] for n, v in enumerate(qres.values, start=1)],
    )
    ll = dims.log_lambda(ifs)
    locals_ = {}
    for x in dims.special_points(ifs):
        ld = dims.local_dim(ifs, tree, x, depth)
        if ld is None:
            locals_[str(_s(x))] = "outside the support"
            continue
        entry = {"upper": ld.upper, "lower": ld.lower, "geometric": ld.geometric}
        if ld.alternate is not None:
            entry["left_tie"] = {"upper": ld.alternate.upper, "lower": ld.alternate.lower}
        locals_[str(_s(x))] = entry
    reg = dims.regularity_checks(ifs, tree, config.q_grid, qres, comparable_depth=_cap(config, 7))
    warnings = list(reg.warnings)
    bundle.summary["dims"] = {
        "depth": depth,
        "endpoint_dim_at_0": ed.dim0,
        "endpoint_dim_at_1": ed.dim1,
        "endpoint_exact_geometric": [ed.geometric0, ed.geometric1],
        "Q": qres.as_dict(),
        "qa_upper_estimate": dims.qa_upper_estimate(qres, ifs),
        "qa_claim": "estimate (exact over the window)" if qres.exact else "estimate from lower bounds",
        "local_dims": locals_,
        "local_dims_claim": f"trend over levels {max(1, (depth + 1) // 2)}..{depth}; valid under weak comparability ({reg.weakly_comparable_verdict})",
        "regularity": reg.as_dict(),
        "lambda_log": ll,
        "warnings": warnings,
    }
    reg_rows = []
    for kind, table in (("generalized_regular", reg.generalized_regular), ("weakly_comparable", reg.weakly_comparable)):
        for q, entry in table.items():
            for n, v in enumerate(entry["sequence"], start=1):
                reg_rows.append([kind, q, n, v, entry["trend"]])
    bundle.table("regularity", ["check", "q", "n", "value_float", "trend"], reg_rows)
    return qres


def section_checks(ifs, tree, rep, config: AnalysisConfig, bundle: Bundle) -> None:
    if rep is None:
        bundle.partial.append("checks: skipped (no separation report)")
        return
    depth = _cap(config, 14)
    led = dims.quasi_net_doubling_check(ifs, tree, rep, (1,) + tuple(config.q_grid), depth)
    rows = []
    for q, row in led.rows.items():
        for n, w, c in zip(led.levels, led.worst, row["constants"]):
            rows.append([q, n, str(w.lower) if w else "", c, row["verdict"]])
    bundle.table("doubling", ["q", "n", "value_exact", "value_float", "verdict"], rows)
    bundle.summary["doubling"] = {
        "claim": "certified ratios; verdicts are finite-window trends",
        "doubling_row": led.rows["1"]["verdict"],
        **led.as_dict(),
    }


def section_hdelta(measure, tree, config: AnalysisConfig, bundle: Bundle) -> None:
    depth = config.depth
    out = {}
    rows = []
    rng = random.Random(config.seed)
    for delta in config.delta_grid:
        if isinstance(measure, MoranMeasure):
            mass = dims.moran_mass(measure)
            wit = dims.moran_witnesses(delta, depth)
        else:
            mass = dims.ifs_mass(measure)
            wit = dims.default_witnesses(measure, tree, delta, depth)
            fam = presets.WITNESS_FAMILIES.get(config.preset)
            if fam is not None:
                wit = wit + fam(measure, tree, delta, depth)
        wit = wit + _random_witnesses(rng, delta, depth, config.random_witnesses, measure)
        res = dims.h_delta_estimate(mass, wit, delta, depth)
        out[repr(delta)] = res.as_dict()
        rows.append([delta, depth, res.value, res.witness["family"] if res.witness else "", "certified-lower-bound"])
    bundle.table("hdelta", ["delta", "depth", "value_float", "family", "verdict"], rows)
    bundle.summary["hdelta"] = out
    if isinstance(measure, MoranMeasure):
        scales = []
        n = 2
        while n <= depth:
            scales.append({"n": n, "exponent": dims.moran_scale_exponent(measure, n)})
            n *= 2
        bundle.summary["moran_adjacent_scales"] = {"claim": "exact masses, float exponent", "witnesses": scales}


def _random_witnesses(rng: random.Random, delta: float, depth: int, count: int, measure) -> list:
    if count <= 0:
        return []
    base = 3 if isinstance(measure, MoranMeasure) else None
    out = []
    window = list(dims.scale_window(delta, depth))
    for _ in range(count):
        N = rng.choice(window)
        n = dims.fine_level(delta, N)
        x = mpq(rng.randrange(0, 2**30), 2**30)
        if base is None:
            R, r = measure.lam_pow(N), measure.lam_pow(n)
        else:
            R, r = mpq(1, base**N), mpq(1, base**n)
        out.append(dims.Witness(x, R, r, "random"))
    return out


def section_moran(measure: MoranMeasure, config: AnalysisConfig, bundle: Bundle) -> None:
    depth = config.depth
    rows = []
    for n in range(1, depth + 1):
        v = moran_mu_ball(measure, mpq(0), mpq(1, 3**n))
        rows.append([n, str(v.lower), _f(v.lower), "exact" if v.exact else "bounds"])
    bundle.table("moran_ball_at_0", ["n", "value_exact", "value_float", "verdict"], rows)
    bundle.summary["moran"] = measure.describe()


# ---------------------------------------------------------------- run


def run(config: AnalysisConfig) -> tuple[Bundle, int]:
    config.validate()
    measure = load_preset(config.preset) if config.preset else load_spec(config.spec)
    bundle = Bundle(config)
    bundle.summary["claims_discipline"] = CLAIMS
    bundle.summary["input"] = config.label
    bundle.summary["config"] = {
        "command": config.command,
        "depth": config.depth,
        "word_budget": config.word_budget,
        "state_budget": config.state_budget,
        "q": list(config.q_grid),
        "delta": list(config.delta_grid),
        "seed": config.seed,
    }
    cmd = config.command
    if isinstance(measure, MoranMeasure):
        if cmd not in ("analyze", "hdelta", "dims"):
            raise SpecError(f"{cmd} needs an IFS; {config.label} is a level-dependent Cantor measure")
        bundle.summary["measure"] = measure.describe()
        if cmd in ("analyze", "dims"):
            section_moran(measure, config, bundle)
        if cmd in ("analyze", "hdelta"):
            section_hdelta(measure, None, config, bundle)
        return bundle, (3 if bundle.partial else 0)
    ifs = measure
    bundle.summary["measure"] = ifs.describe()
    tree = NetTree(ifs)
    graph = None
    try:
        if cmd == "net-tree":
            section_net_tree(ifs, tree, config, bundle)
        if cmd in ("analyze", "finite-type", "separation", "dims", "checks"):
            graph = section_finite_type(ifs, tree, config, bundle)
        rep = None
        if cmd in ("analyze", "separation", "checks"):
            rep = section_separation(ifs, tree, graph, config, bundle)
        if cmd in ("analyze", "dims"):
            section_dims(ifs, tree, graph, config, bundle)
        if cmd in ("analyze", "checks"):
            section_checks(ifs, tree, rep, config, bundle)
        if cmd in ("analyze", "hdelta"):
            section_hdelta(ifs, tree, config, bundle)
    except BudgetExceeded as exc:
        bundle.partial.append(str(exc))
    return bundle, (3 if bundle.partial else 0)


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def write_bundle(bundle: Bundle, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = dict(bundle.summary)
    summary["partial"] = bundle.partial
    written = []
    if bundle.config.fmt == "json":
        doc = {
            "summary": summary,
            "tables": {k: {"header": h, "rows": r} for k, (h, r) in bundle.tables.items()},
            **bundle.files,
        }
        p = out / "report.json"
        p.write_text(_dumps(doc))
        return [p]
    p = out / "summary.json"
    p.write_text(_dumps(summary))
    written.append(p)
    for name, (h, r) in bundle.tables.items():
        p = out / f"{name}.csv"
        p.write_text(_csv_text(h, r))
        written.append(p)
    for name, doc in bundle.files.items():
        p = out / f"{name}.json"
        p.write_text(_dumps(doc))
        written.append(p)
    return written


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artifact", description="Exact analysis of self-similar measures with overlaps.")
    p.add_argument("command", choices=SUBCOMMANDS)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=presets.preset_names())
    src.add_argument("--spec", help="JSON spec file")
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--word-budget", type=int, default=DEFAULT_WORD_BUDGET)
    p.add_argument("--state-budget", type=int, default=20000)
    p.add_argument("--q", type=_floats, default=(1.05, 1.2, 2.0), help="comma-separated q grid, each > 1")
    p.add_argument("--delta", type=_floats, default=(1.0, 0.5), help="comma-separated delta grid, each > 0")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="report")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-witnesses", type=int, default=0, help="extra seeded random H(delta) witnesses per delta")
    p.add_argument("--emit", help="also write the finite-type graph JSON here")
    return p


def _origin(exc: BaseException) -> str:
    here = Path(__file__).parent
    name = "artifact"
    for frame in traceback.extract_tb(exc.__traceback__):
        p = Path(frame.filename)
        if p.parent == here:
            name = p.stem
    return name


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    config = AnalysisConfig(
        command=args.command,
        preset=args.preset,
        spec=args.spec,
        depth=args.depth,
        word_budget=args.word_budget,
        state_budget=args.state_budget,
        q_grid=args.q,
        delta_grid=args.delta,
        fmt=args.format,
        out=args.out,
        seed=args.seed,
        random_witnesses=args.random_witnesses,
        emit=args.emit,
        argv=tuple(argv),
    )
    try:
        bundle, code = run(config)
    except SpecError as exc:
        print(f"error [cli-report]: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # surfaced with the originating module and a reproduction line
        module = _origin(exc)
        print(f"error [{module}]: {exc}", file=sys.stderr)
        print("reproduce with: python -m artifact " + " ".join(argv), file=sys.stderr)
        return 1
    for path in write_bundle(bundle, config.out):
        print(path)
    for msg in bundle.partial:
        print(f"partial: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
