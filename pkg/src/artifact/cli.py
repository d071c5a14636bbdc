"""hecke-graph: neighbourhoods of unramified Hecke operators on elliptic curves.

    hecke-graph curve-info --curve X_2
    hecke-graph graph --curve X_2 --rank 2 --r 1 --point x0 --window -2:2 --format dot
    hecke-graph verify --curve X_3 --suite rank2
    hecke-graph symfunc-expand "p1*p2"

Every option can also come from a JSON config (--config); flags win.
Exit codes: 0 ok, 2 config error, 3 unsupported relation, 4 verification failure.
"""

import argparse
import hashlib
import json
import os
import re
import sys
import time

from .chars import CharTable
from .curve import CurveError, DegreeBoundExceeded, EllipticCurve, one_point_curve
from .ehall import StepBudgetExceeded, UnsupportedRelation
from .heckegraph import (HeckePipeline, NonIntegerMultiplicity, PipelineError, SumRuleViolation,
                         decomposable_closed_form, gaussian_binomial, rank2_closed_form,
                         rank2_item, rank3_closed_form, stable_closed_form)
from .scalars import RationalFunctionV
from .sheaves import CoherentSheaf, IndecompSheaf, bundles_in_window, display_name
from .symfunc import SymFunc, p_mul

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_UNSUPPORTED, EXIT_VERIFY = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


# -- configuration
DEFAULTS = {
    "curve": None,
    "q": None,
    "coeffs": None,
    "base_point": None,
    "max_degree": 3,
    "rank": 2,
    "r": 1,
    "point": "x0",
    "window": [-2, 2],
    "format": "json",
    "output": None,
    "gamma2": "derive",
    "gamma2_constant": None,
    "step_budget": 2_000_000,
    "suite": "all",
}


def _flatten_config(doc):
    """Accept either a flat document or the nested curve/operator/engine layout."""
    out = {}
    for k, v in doc.items():
        if k == "curve" and isinstance(v, dict):
            for kk in ("q", "coeffs", "base_point", "max_degree"):
                if kk in v:
                    out[kk] = v[kk]
            if "name" in v:
                out["curve"] = v["name"]
        elif k == "operator" and isinstance(v, dict):
            if "r" in v:
                out["r"] = v["r"]
            if "x" in v:
                out["point"] = v["x"]
            if "point" in v:
                out["point"] = v["point"]
        elif k == "engine" and isinstance(v, dict):
            out.update(v)
        else:
            out[k.replace("-", "_")] = v
    unknown = set(out) - set(DEFAULTS)
    if unknown:
        raise ConfigError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    return out


def load_config(args):
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("cannot read config %s: %s" % (args.config, exc))
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        cfg.update(_flatten_config(doc))
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if isinstance(cfg["window"], str):
        cfg["window"] = parse_window(cfg["window"])
    if isinstance(cfg["coeffs"], str):
        cfg["coeffs"] = _int_list(cfg["coeffs"], "coeffs")
    if isinstance(cfg["base_point"], str):
        cfg["base_point"] = _int_list(cfg["base_point"], "base point")
    if cfg["gamma2_constant"] is not None and cfg["gamma2"] == "derive":
        cfg["gamma2"] = "config"
    if cfg["gamma2"] not in ("derive", "strict", "config"):
        raise ConfigError("gamma2 mode must be derive, strict or config")
    if cfg["format"] not in ("json", "dot", "both", "text"):
        raise ConfigError("format must be json, dot or both")
    return cfg


def _int_list(text, what):
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise ConfigError("bad %s %r" % (what, text))


def parse_window(text):
    m = re.fullmatch(r"\s*(-?\d+)\s*:\s*(-?\d+)\s*", str(text))
    if not m:
        raise ConfigError("window must look like MIN:MAX, got %r" % (text,))
    return [int(m.group(1)), int(m.group(2))]


def build_curve(cfg):
    try:
        if cfg["curve"]:
            name = cfg["curve"].upper().replace("X", "").strip("_")
            if not name.isdigit():
                raise ConfigError("named curves are X_2, X_3, X_4")
            return one_point_curve(int(name), max_degree=cfg["max_degree"])
        if cfg["q"] is None or cfg["coeffs"] is None:
            raise ConfigError("give --curve NAME or both --q and --coeffs")
        bp = cfg["base_point"]
        return EllipticCurve(int(cfg["q"]), tuple(cfg["coeffs"]),
                             base_point=tuple(bp) if bp else None, max_degree=cfg["max_degree"])
    except (CurveError, DegreeBoundExceeded) as exc:
        raise ConfigError(str(exc))


def resolve_point(curve, spec):
    """A closed point from its name (x0, p2.1), 'deg:index' or rational coordinates 'X,Y'."""
    if isinstance(spec, dict):
        spec = spec.get("rep", spec.get("name"))
    spec = str(spec).strip()
    try:
        if ":" in spec:
            deg, idx = (int(t) for t in spec.split(":"))
            return curve.closed_points_of_degree(deg)[idx]
        if "," in spec:
            X, Y = (int(t) for t in spec.split(","))
            emb = curve.F.base_embed
            return curve.closed_point_of((emb[X], emb[Y]))
        return curve.closed_point_by_name(spec)
    except (CurveError, DegreeBoundExceeded, IndexError, ValueError, KeyError) as exc:
        raise ConfigError("cannot resolve point %r: %s" % (spec, exc))


def make_pipeline(curve, cfg):
    opts = {"gamma2": cfg["gamma2"], "step_budget": int(cfg["step_budget"])}
    if cfg["gamma2_constant"] is not None:
        try:
            opts["gamma2_constant"] = RationalFunctionV.parse(str(cfg["gamma2_constant"]))
        except Exception as exc:
            raise ConfigError("cannot parse gamma2 constant %r: %s" % (cfg["gamma2_constant"], exc))
    return HeckePipeline(curve, CharTable(curve), **opts)


# -- serialisation
def sheaf_id(E):
    return str(E)


def vertex_record(E):
    return {"id": sheaf_id(E), "label": display_name(E),
            "hn": [[p.n, p.d, str(p.point), p.weight] for p in E.parts]}


def _vertex_order(E):
    return (E.degree, display_name(E), sheaf_id(E))


def graph_document(curve, x, r, n, slc):
    verts = sorted(set(slc.vertices) | set(slc.boundary), key=_vertex_order)
    rank = {E: i for i, E in enumerate(verts)}
    edges = sorted(slc.edges, key=lambda e: (rank[e.source], rank[e.target]))
    return {
        "curve": curve.describe(),
        "operator": {"x": {"degree": x.degree, "rep": str(x)}, "r": r},
        "rank": n,
        "vertices": [vertex_record(E) for E in verts],
        "edges": [{"src": sheaf_id(e.source), "dst": sheaf_id(e.target), "mult": e.multiplicity}
                  for e in edges],
        "boundary": [sheaf_id(E) for E in sorted(slc.boundary, key=_vertex_order)],
    }


def dumps_json(doc):
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _dot_quote(s):
    return '"%s"' % s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(doc):
    lines = ["digraph hecke {", "  rankdir=LR;"]
    boundary = set(doc.get("boundary", ()))
    for v in doc["vertices"]:
        extra = ", style=dashed" if v["id"] in boundary else ""
        lines.append("  %s [label=%s%s];" % (_dot_quote(v["id"]), _dot_quote(v["label"]), extra))
    for e in doc["edges"]:
        lines.append("  %s -> %s [label=\"%d\"];" % (_dot_quote(e["src"]), _dot_quote(e["dst"]), e["mult"]))
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- cache
def cache_dir():
    return os.environ.get("HECKE_CACHE_DIR")


def _cache_key(cfg, cmd):
    keep = {k: cfg[k] for k in ("curve", "q", "coeffs", "base_point", "max_degree", "rank", "r",
                                "point", "window", "gamma2", "gamma2_constant")}
    keep["cmd"] = cmd
    return hashlib.sha256(json.dumps(keep, sort_keys=True).encode()).hexdigest()[:24]


def cache_get(cfg, cmd):
    d = cache_dir()
    if not d:
        return None
    path = os.path.join(d, _cache_key(cfg, cmd) + ".json")
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None


def cache_put(cfg, cmd, doc):
    d = cache_dir()
    if not d:
        return
    os.makedirs(d, exist_ok=True)
    path = os.path.join(d, _cache_key(cfg, cmd) + ".json")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)


# -- commands
def cmd_curve_info(cfg, out):
    curve = build_curve(cfg)
    table = CharTable(curve)
    info = {"curve": curve.describe(), "name": curve.name, "degrees": []}
    for n in range(1, curve.max_degree + 1):
        S = table.structure(n)
        info["degrees"].append({
            "n": n,
            "N": S.order,
            "pic0": list(S.invariants()),
            "closed_points": [str(cp) for cp in curve.closed_points_of_degree(n)],
        })
    if cfg["format"] == "json":
        out.write(dumps_json(info))
        return EXIT_OK
    out.write("curve %s over F_%d, coefficients %s\n" % (curve.name, curve.q, list(curve.raw_coeffs)))
    for row in info["degrees"]:
        pic = " x ".join("Z/%d" % d for d in row["pic0"]) or "trivial"
        out.write("N_%d = %d   Pic0(X_%d) = %s\n" % (row["n"], row["N"], row["n"], pic))
        out.write("  closed points of degree %d (%d): %s\n"
                  % (row["n"], len(row["closed_points"]), " ".join(row["closed_points"]) or "-"))
    return EXIT_OK


def compute_graph(cfg):
    doc = cache_get(cfg, "graph")
    if doc is not None:
        return doc
    curve = build_curve(cfg)
    x = resolve_point(curve, cfg["point"])
    n, r = int(cfg["rank"]), int(cfg["r"])
    if not 1 <= n <= 3:
        raise ConfigError("rank must be 1, 2 or 3")
    if not 1 <= r <= n:
        raise ConfigError("need 1 <= r <= rank")
    lo, hi = cfg["window"]
    P = make_pipeline(curve, cfg)
    slc = P.full_graph(x, r, n, lo, hi)
    doc = graph_document(curve, x, r, n, slc)
    cache_put(cfg, "graph", doc)
    return doc


def cmd_graph(cfg, out):
    doc = compute_graph(cfg)
    fmt = cfg["format"]
    texts = []
    if fmt in ("json", "both", "text"):
        texts.append((".json", dumps_json(doc)))
    if fmt in ("dot", "both"):
        texts.append((".dot", to_dot(doc)))
    if cfg["output"]:
        for ext, text in texts:
            path = cfg["output"] if len(texts) == 1 else cfg["output"] + ext
            with open(path, "w") as fh:
                fh.write(text)
    else:
        for _, text in texts:
            out.write(text)
    return EXIT_OK


# -- verification suites
def _report(out, name, ok, detail=""):
    out.write(json.dumps({"check": name, "pass": bool(ok), "detail": detail}) + "\n")
    return ok


def suite_sum_rule(ctx, cfg, out):
    curve, P = ctx
    x = resolve_point(curve, cfg["point"])
    n, r = int(cfg["rank"]), int(cfg["r"])
    lo, hi = cfg["window"]
    want = gaussian_binomial(n, r, curve.q ** x.degree)
    ok = True
    for E in bundles_in_window(curve, n, lo, hi):
        try:
            total = sum(e.multiplicity for e in P.neighborhood(E, x, r))
            good = total == want
        except SumRuleViolation as exc:
            total, good = str(exc).splitlines()[0], False
        ok &= _report(out, "sum-rule %s" % sheaf_id(E), good, "sum %s, want %d" % (total, want))
    return ok


def suite_rank2(ctx, cfg, out):
    curve, P = ctx
    if len(curve.closed_points_of_degree(1)) != 1:
        return _report(out, "rank2", True, "skipped: closed form is for one-point curves")
    x = curve.base_closed_point
    lo, hi = cfg["window"]
    ok = True
    for E in bundles_in_window(curve, 2, lo, hi):
        got = {sheaf_id(e.target): e.multiplicity for e in P.neighborhood(E, x, 1)}
        want = {sheaf_id(F): m for F, m in rank2_closed_form(curve, E).items()}
        ok &= _report(out, "rank2 item %d %s" % (rank2_item(E), display_name(E)), got == want,
                      "" if got == want else "got %s, want %s" % (got, want))
    return ok


def suite_rank3(ctx, cfg, out):
    curve, P = ctx
    ones = curve.closed_points_of_degree(1)
    ok = True
    seen = set()
    for x in ones:
        for xp in ones:
            E = CoherentSheaf([IndecompSheaf(3, 2, xp, 1)])
            got = P.incoming(E, x, 1)
            want = rank3_closed_form(curve, x, xp, 2)
            seen.update(got.values())
            ok &= _report(out, "rank3 x=%s x'=%s" % (x, xp), got == want,
                          "" if got == want else "got %s, want %s" % (got, want))
    _report(out, "rank3 constants", True, "seen %s" % sorted(seen, reverse=True))
    return ok


def suite_stable(ctx, cfg, out):
    curve, P = ctx
    ok = True
    for x in curve.closed_points_of_degree(1)[:2]:
        for n in (2, 3):
            for y in curve.closed_points_of_degree(n):
                E = CoherentSheaf([IndecompSheaf(n, n, y, 1)])
                got = P.incoming(E, x, 1)
                want = stable_closed_form(curve, E, x)
                ok &= _report(out, "stable n=%d x=%s y=%s" % (n, x, y), got == want,
                              "" if got == want else "got %s, want %s" % (got, want))
    return ok


def suite_decomposable(ctx, cfg, out):
    curve, P = ctx
    ok = True
    for e in (1, 2):
        pts = curve.closed_points_of_degree(e)
        if not pts:
            continue
        x = pts[0]
        ys = curve.closed_points_of_degree(1)
        for n in (2, 3):
            gap = e + 1
            E = CoherentSheaf([IndecompSheaf(1, k * gap, ys[k % len(ys)], 1) for k in range(n)])
            got = {t.target: t.multiplicity for t in P.neighborhood(E, x, 1)}
            want = decomposable_closed_form(curve, E, x)
            ok &= _report(out, "decomposable n=%d |x|=%d" % (n, e), got == want,
                          "" if got == want else "got %s, want %s" % (got, want))
    return ok


def suite_symfunc(ctx, cfg, out):
    v2 = RationalFunctionV.monomial(2)
    one = RationalFunctionV.const(1)
    checks = [
        ("p1p2", "p1*p2", {(1, 1, 1): v2 ** 3 - one, (2, 1): v2, (3,): one}),
        ("p1^2", "p1^2", {(1, 1): v2 + one, (2,): one}),
        ("p1^3", "p1^3", {(1, 1, 1): v2 ** 3 + 2 * v2 ** 2 + 2 * v2 + one, (2, 1): v2 + 2 * one,
                          (3,): one}),
    ]
    ok = True
    for name, expr, want in checks:
        got = expand_expression(expr, "hall-littlewood").coeffs
        ok &= _report(out, "symfunc %s" % name, got == want, "" if got == want else repr(got))
    return ok


SUITES = {
    "sum-rule": suite_sum_rule,
    "rank2": suite_rank2,
    "rank3": suite_rank3,
    "stable": suite_stable,
    "decomposable": suite_decomposable,
    "symfunc": suite_symfunc,
}


def cmd_verify(cfg, out):
    names = list(SUITES) if cfg["suite"] == "all" else cfg["suite"].split(",")
    for name in names:
        if name not in SUITES:
            raise ConfigError("unknown suite %r (have %s)" % (name, ", ".join(SUITES)))
    curve = build_curve(cfg)
    ctx = (curve, make_pipeline(curve, cfg))
    ok = True
    for name in names:
        t = time.perf_counter()
        good = SUITES[name](ctx, cfg, out)
        ok &= good
        sys.stderr.write("suite %s: %s (%.1fs)\n" % (name, "pass" if good else "FAIL", time.perf_counter() - t))
    return EXIT_OK if ok else EXIT_VERIFY


# -- symmetric functions
_FACTOR = re.compile(r"([pemP])(\d+)(?:\^(\d+))?$")
_BASIS = {"p": "power", "e": "elementary", "m": "monomial", "P": "hall-littlewood"}


def expand_expression(text, target):
    """Sum of products like 'p1*p2 + 2*e3' or 'P21^2'; p, e take one part, m, P list digits."""
    total = {}
    for term in text.replace(" ", "").replace("-", "+-").split("+"):
        if not term:
            continue
        coef = 1
        pd = {(): RationalFunctionV.const(1)}
        for f in term.split("*"):
            if re.fullmatch(r"-?\d+", f):
                coef *= int(f)
                continue
            if f.startswith("-"):
                coef, f = -coef, f[1:]
            m = _FACTOR.match(f)
            if not m:
                raise ConfigError("cannot parse factor %r" % f)
            letter, digits, power = m.group(1), m.group(2), int(m.group(3) or 1)
            lam = (int(digits),) if letter in "pe" else tuple(int(c) for c in digits)
            piece = SymFunc(_BASIS[letter], {lam: 1}).to_power().coeffs
            for _ in range(power):
                pd = p_mul(pd, piece)
        for lam, c in pd.items():
            total[lam] = total.get(lam, RationalFunctionV.const(0)) + c * coef
    return SymFunc("power", total).to(target)


def cmd_symfunc(args, out):
    res = expand_expression(args.expression, args.to)
    prefix = {"power": "p", "elementary": "e", "monomial": "m", "hall-littlewood": "P"}[args.to]
    terms = []
    for lam in sorted(res.coeffs, reverse=True):
        c = res.coeffs[lam]
        terms.append("(%s) %s%s" % (c, prefix, "".join(map(str, lam)) if max(lam) < 10 else list(lam)))
    out.write((" + ".join(terms) or "0") + "\n")
    return EXIT_OK


# -- argument parsing
def build_parser():
    ap = argparse.ArgumentParser(prog="hecke-graph", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--curve", help="named curve: X_2, X_3 or X_4")
    common.add_argument("--q", type=int)
    common.add_argument("--coeffs", help="a1,a2,a3,a4,a6 as field element codes")
    common.add_argument("--base-point", dest="base_point", help="X,Y (default: point at infinity)")
    common.add_argument("--max-degree", dest="max_degree", type=int)
    common.add_argument("--rank", type=int)
    common.add_argument("--r", type=int)
    common.add_argument("--point", help="x0, p2.1, DEG:INDEX or X,Y")
    common.add_argument("--window", help="MIN:MAX range of HN slopes")
    common.add_argument("--format", choices=["json", "dot", "both", "text"])
    common.add_argument("--output", help="output file (prefix when --format both)")
    common.add_argument("--gamma2", choices=["derive", "strict", "config"])
    common.add_argument("--gamma2-constant", dest="gamma2_constant", metavar="EXPR")
    common.add_argument("--step-budget", dest="step_budget", type=int, metavar="N")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("curve-info", parents=[common], help="point counts, closed points, Pic0")
    p.set_defaults(func=cmd_curve_info)
    p = sub.add_parser("graph", parents=[common], help="neighbourhoods over a degree window")
    p.set_defaults(func=cmd_graph)
    p = sub.add_parser("verify", parents=[common], help="closed-form and sum-rule checks")
    p.add_argument("--suite", help="comma list of %s, or all" % ", ".join(SUITES))
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("symfunc-expand", help="rewrite a symmetric function in another basis")
    p.add_argument("expression", help="e.g. 'p1*p2', 'p1^3', 'e2', 'P21'")
    p.add_argument("--to", default="hall-littlewood",
                   choices=["hall-littlewood", "power", "monomial", "elementary"])
    p.set_defaults(func=None)
    return ap


def _glue_window(argv):
    """--window -2:2 would read as an option; glue it to the flag."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--window" and i + 1 < len(argv):
            out.append("--window=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(_glue_window(sys.argv[1:] if argv is None else list(argv)))
    try:
        if args.command == "symfunc-expand":
            return cmd_symfunc(args, out)
        if args.command == "curve-info" and args.format is None:
            args.format = "text"
        cfg = load_config(args)
        return args.func(cfg, out)
    except ConfigError as exc:
        sys.stderr.write("config error: %s\n" % exc)
        return EXIT_CONFIG
    except UnsupportedRelation as exc:
        sys.stderr.write("unsupported relation: %s\n" % exc)
        return EXIT_UNSUPPORTED
    except PipelineError as exc:
        if isinstance(exc.cause, UnsupportedRelation):
            sys.stderr.write("unsupported relation at step %s: %s\n" % (exc.step, exc.cause))
            return EXIT_UNSUPPORTED
        sys.stderr.write("pipeline error: %s\n" % exc)
        return EXIT_ERROR
    except (SumRuleViolation, NonIntegerMultiplicity) as exc:
        sys.stderr.write("verification failure: %s\n" % exc)
        return EXIT_VERIFY
    except StepBudgetExceeded as exc:
        sys.stderr.write("step budget exceeded: %s\n" % exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
