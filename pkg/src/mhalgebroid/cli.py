"""Command line front end: verify | dualize | bidual on JSON model files.

A model file is {"kind": ..., "payload": {...}, "options": {"scalars": "Q" | "Q_i"}}.
Exit codes: 0 all requested checks pass, 1 a mathematical failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .algebra import StructureAlgebra
from .algebroid import AlgebroidData, HopfAlgebroid, VerificationReport, verify_axioms
from .exactlin import Gaussian, Matrix, format_scalar, parse_scalar
from .registry import ALL_CHECKS, GROUP_ORDER, GROUP_TITLES, group_of, order_of

KINDS = ("groupoid", "crossed_product", "raw_algebroid")

# payload keys whose strings are labels rather than scalars
_LABEL_KEYS = {"labels", "name", "units", "arrows", "compose", "inverse", "elements", "table", "id", "src",
               "tgt", "kind", "hopf_variant"}


class InputError(ValueError):
    pass


def _scan_scalars(obj, allow_gaussian: bool, path: str = "payload"):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == "measure" and isinstance(v, dict):
                for u, w in v.items():
                    _scan_scalars(w, allow_gaussian, f"{path}.measure.{u}")
            elif k in ("right_action", "left_action") and isinstance(v, list):
                for i, e in enumerate(v):
                    if isinstance(e, list) and len(e) == 3:
                        _scan_scalars(e[2], allow_gaussian, f"{path}.{k}[{i}]")
            elif k not in _LABEL_KEYS:
                _scan_scalars(v, allow_gaussian, f"{path}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _scan_scalars(v, allow_gaussian, f"{path}[{i}]")
    elif isinstance(obj, str):
        try:
            s = parse_scalar(obj)
        except (ValueError, TypeError, ZeroDivisionError):
            raise InputError(f"{path}: {obj!r} is not a scalar") from None
        if isinstance(s, Gaussian) and s.im != 0 and not allow_gaussian:
            raise InputError(f"{path}: Gaussian scalar {obj!r} needs --scalars Qi")
    elif isinstance(obj, bool) or not isinstance(obj, (int, type(None))):
        raise InputError(f"{path}: unexpected value {obj!r}")


def _matrix(rows, nrows: int, ncols: int, what: str) -> Matrix:
    try:
        M = Matrix([[parse_scalar(x) for x in r] for r in rows], ncols)
    except (TypeError, ValueError) as ex:
        raise InputError(f"{what}: {ex}") from None
    if M.nrows != nrows or M.ncols != ncols:
        raise InputError(f"{what} must be {nrows}x{ncols}")
    return M


def _tensor(entries, n: int, what: str) -> Dict:
    t = {}
    for e in entries:
        if len(e) != 3:
            raise InputError(f"{what}: tensor entries are [i, j, coefficient]")
        i, j, c = int(e[0]), int(e[1]), parse_scalar(e[2])
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"{what}: index out of range")
        t[(i, j)] = t.get((i, j), 0) + c
    return {k: v for k, v in t.items() if v != 0}


def _vector(v, n: int, what: str) -> List:
    if not isinstance(v, list) or len(v) != n:
        raise InputError(f"{what} must be a list of {n} scalars")
    return [parse_scalar(x) for x in v]


# ---------------------------------------------------------------------- models


@dataclass
class RunResult:
    report: VerificationReport
    dual: object = None         # DualMeasured
    bidual: object = None       # BidualCertificate
    measured: object = None
    error: str = ""
    source: object = None       # GroupoidModel / CrossedModel / HopfAlgebroid


@dataclass
class Model:
    kind: str
    name: str
    payload: dict
    gaussian: bool = False
    built: Dict = field(default_factory=dict)

    def run(self, dual: bool = True, bidual: bool = True) -> RunResult:
        return _RUNNERS[self.kind](self, dual, bidual)


def _run_groupoid(m: Model, dual: bool, bidual: bool) -> RunResult:
    from .groupoid_models import UnitMeasure, verify_groupoid
    G, mu = m.built["G"], m.built["mu"]
    rep, model, res = verify_groupoid(G, mu or UnitMeasure.uniform(G), dual=dual, bidual=bidual,
                                      gaussian=m.gaussian)
    return RunResult(rep, res.dual if res else None, res.bidual if res else None, model.measured, source=model)


def _run_crossed(m: Model, dual: bool, bidual: bool) -> RunResult:
    from .crossed_models import verify_crossed
    rep, model, res = verify_crossed(m.built["H"], m.built["D"], dual=dual, bidual=bidual)
    return RunResult(rep, res.dual if res else None, res.bidual if res else None,
                     model.measured if model else None, source=model)


def _run_raw(m: Model, dual: bool, bidual: bool) -> RunResult:
    from .algebra import Functional
    from .duality import verify_duality
    from .integration import verify_integration
    H = m.built["H"]
    rep = verify_axioms(H)
    bw = m.built.get("weight")
    if bw is None:
        return RunResult(rep, error="model has no base weight, so no left integral can be sought", source=H)
    phi, psi = m.built.get("phi"), m.built.get("psi")
    irep, M = verify_integration(H, bw, phi and Functional(H.A, tuple(phi)), psi and Functional(H.A, tuple(psi)),
                                 axioms_ok=rep.all_passed)
    rep.extend(irep)
    if M is None:
        bad = irep.failures()
        return RunResult(rep, error=f"no full faithful left integral ({bad[0].name}: {bad[0].witness})"
                         if bad else "no full faithful left integral", source=H)
    out = RunResult(rep, measured=M, source=H)
    if dual:
        res = verify_duality(M, bidual=bidual, gaussian=m.gaussian)
        rep.extend(res.report)
        out.dual, out.bidual = res.dual, res.bidual
    return out


_RUNNERS = {"groupoid": _run_groupoid, "crossed_product": _run_crossed, "raw_algebroid": _run_raw}


def _build_groupoid(m: Model):
    from .groupoid_models import GroupoidError, groupoid_from_json
    try:
        # positivity of the measure is reported by the base-weight check, not rejected here
        G, mu = groupoid_from_json(m.payload, m.name, positive=False)
    except (GroupoidError, ValueError) as ex:
        raise InputError(str(ex)) from None
    m.built.update(G=G, mu=mu)


def _label_index(labels: Sequence[str], v, what: str) -> int:
    if isinstance(v, int) and not isinstance(v, bool):
        if 0 <= v < len(labels):
            return v
    elif str(v) in labels:
        return list(labels).index(str(v))
    raise InputError(f"{what}: unknown basis element {v!r}")


def _build_crossed(m: Model):
    from .crossed_models import CoupledActionData, CrossedModelError, function_hopf, group_hopf
    p = m.payload
    try:
        grp = p["group"]
        variant = p.get("hopf_variant", "group_algebra")
        if variant not in ("group_algebra", "function_algebra"):
            raise InputError(f"unknown hopf_variant {variant!r}")
        make = group_hopf if variant == "group_algebra" else function_hopf
        Hf = make(grp["elements"], grp["table"], grp.get("name", ""))
        B = StructureAlgebra.from_json(p["B"], p["B"].get("name", "B"))
        C = StructureAlgebra.from_json(p["C"], p["C"].get("name", "C")) if "C" in p else B
    except CrossedModelError as ex:
        raise InputError(str(ex)) from None
    except (KeyError, TypeError, ValueError) as ex:
        if isinstance(ex, InputError):
            raise
        raise InputError(f"malformed crossed product description: {ex}") from None
    nB, nC, nH = B.n, C.n, Hf.n
    if nB != nC:
        raise InputError("B and C must have the same dimension")
    S_B = _matrix(p["S_B"], nC, nB, "S_B")
    try:
        S_C = _matrix(p["S_C"], nB, nC, "S_C") if "S_C" in p else S_B.inverse()
    except ZeroDivisionError:
        raise InputError("S_B is not invertible") from None
    hl = Hf.H.labels

    def actions(key: str, first: str, basis_labels) -> List[Matrix]:
        cols = {}
        for entry in p.get(key, []):
            if len(entry) != 3:
                raise InputError(f"{key}: entries are [{first}, {'h' if first == 'x' else 'y'}, vector]")
            a, b, vec = entry
            if first == "x":
                xi, hj = _label_index(basis_labels, a, key), _label_index(hl, b, key)
            else:
                hj, xi = _label_index(hl, a, key), _label_index(basis_labels, b, key)
            cols[(xi, hj)] = _vector(vec, len(basis_labels), key)
        out = []
        for j in range(nH):
            missing = [i for i in range(len(basis_labels)) if (i, j) not in cols]
            if missing:
                raise InputError(f"{key}: no value for ({basis_labels[missing[0]]}, {hl[j]})")
            out.append(Matrix.from_columns([cols[(i, j)] for i in range(len(basis_labels))], len(basis_labels)))
        return out

    right = actions("right_action", "x", B.labels)
    left = actions("left_action", "h", C.labels)
    D = CoupledActionData(B, C, S_B, S_C, right, left, _vector(p.get("mu_B"), nB, "mu_B"),
                          _vector(p.get("mu_C", p.get("mu_B")), nC, "mu_C"), m.name)
    m.built.update(H=Hf, D=D)


def _build_raw(m: Model):
    from .integration import BaseWeight
    p = m.payload
    try:
        A = StructureAlgebra.from_json(p["algebra"], m.name)
        n = A.n
        Bv = [_vector(v, n, "B") for v in p["B"]]
        Cv = [_vector(v, n, "C") for v in p["C"]]
        S_B = _matrix(p["S_B"], len(Cv), len(Bv), "S_B")
        S_C = _matrix(p["S_C"], len(Bv), len(Cv), "S_C")
        if len(p["D_B"]) != n or len(p["D_C"]) != n:
            raise InputError(f"D_B and D_C need one tensor per basis element ({n})")
        DB = [_tensor(t, n, "D_B") for t in p["D_B"]]
        DC = [_tensor(t, n, "D_C") for t in p["D_C"]]
        extra = {}
        if "counit_B" in p:
            extra["counit_B"] = _matrix(p["counit_B"], len(Bv), n, "counit_B")
        if "counit_C" in p:
            extra["counit_C"] = _matrix(p["counit_C"], len(Cv), n, "counit_C")
        if "antipode" in p:
            extra["antipode"] = _matrix(p["antipode"], n, n, "antipode")
        H = HopfAlgebroid(AlgebroidData(A, Bv, Cv, S_B, S_C, DB, DC, name=m.name, **extra))
    except InputError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as ex:
        raise InputError(f"malformed raw algebroid description: {ex}") from None
    m.built["H"] = H
    if "base_weight" in p:
        bw = p["base_weight"]
        m.built["weight"] = BaseWeight(tuple(_vector(bw.get("mu_B"), len(Bv), "mu_B")),
                                       tuple(_vector(bw.get("mu_C"), len(Cv), "mu_C")))
    for k in ("phi", "psi"):
        if k in p:
            m.built[k] = _vector(p[k], n, k)


_BUILDERS = {"groupoid": _build_groupoid, "crossed_product": _build_crossed, "raw_algebroid": _build_raw}


def load_model(doc, name: str = "", scalars: Optional[str] = None) -> Model:
    """Validate a parsed model file and build its ingredients; raises InputError."""
    if not isinstance(doc, dict):
        raise InputError("model file must hold a JSON object")
    if "kind" not in doc and "units" in doc:
        doc = {"kind": "groupoid", "payload": doc}
    kind = doc.get("kind")
    if kind not in KINDS:
        raise InputError(f"kind must be one of {', '.join(KINDS)}")
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise InputError("payload must be an object")
    opts = doc.get("options") or {}
    sc = scalars or opts.get("scalars", "Q")
    if sc not in ("Q", "Qi", "Q_i"):
        raise InputError(f"unknown scalar field {sc!r}")
    gaussian = sc != "Q"
    _scan_scalars(payload, gaussian)
    m = Model(kind, name or doc.get("name") or payload.get("name") or kind, payload, gaussian)
    _BUILDERS[kind](m)
    return m


def read_model(path: str, scalars: Optional[str] = None) -> Model:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as ex:
        raise InputError(f"cannot read {path}: {ex.strerror}") from None
    except json.JSONDecodeError as ex:
        raise InputError(f"{path} is not valid JSON: {ex}") from None
    import os
    return load_model(doc, os.path.splitext(os.path.basename(path))[0], scalars)


# ---------------------------------------------------------------------- reports


def canonical(rep: VerificationReport) -> VerificationReport:
    """Registry order, first occurrence of each name."""
    seen, checks = set(), []
    for c in sorted(rep.checks, key=lambda c: order_of(c.name)):
        if c.name not in seen:
            seen.add(c.name)
            checks.append(c)
    return VerificationReport(checks, dict(rep.summary))


def summarize(rep: VerificationReport) -> Dict[str, Optional[bool]]:
    def group_ok(g):
        cs = [c for c in rep.checks if c.group == g]
        return all(c.passed for c in cs) if cs else None
    bid = rep.get("biduality")
    dual = [c for c in rep.checks if c.group == "duality" and c.name != "biduality"]
    return {"regular": group_ok("hopf-algebroid"), "measured": group_ok("integration"),
            "dual_ok": all(c.passed for c in dual) if dual else None,
            "bidual_ok": bid.passed if bid is not None else None}


def format_text(model: Model, rep: VerificationReport) -> str:
    lines = [f"model {model.name} ({model.kind})"]
    for g in GROUP_ORDER:
        cs = [c for c in rep.checks if c.group == g]
        if not cs:
            continue
        lines.append(f"[{GROUP_TITLES[g]}]")
        for c in cs:
            tail = f"  {c.witness}" if c.witness else ""
            lines.append(f"  {'PASS' if c.passed else 'FAIL'} {c.name}{tail}")
    s = summarize(rep)
    lines.append("summary: " + ", ".join(f"{k}={'-' if v is None else str(v).lower()}" for k, v in s.items()))
    fails = rep.failures()
    lines.append(f"{len(rep.checks) - len(fails)}/{len(rep.checks)} checks pass"
                 + (f"; first failure {fails[0].name}" if fails else ""))
    return "\n".join(lines) + "\n"


def report_json(model: Model, rep: VerificationReport) -> dict:
    return {"model": model.name, "kind": model.kind,
            "checks": [c.to_json() for c in rep.checks], "summary": summarize(rep)}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _fmt_vec(v) -> List[str]:
    return [format_scalar(c) for c in v]


def dual_json(model: Model, res: RunResult) -> dict:
    DM = res.dual
    D = DM.algebra
    hatA = DM.dual_algebroid.A
    labels = [f"{l}.phi" for l in D.H.A.labels]
    return {
        "model": model.name,
        "basis": labels,
        "mult": hatA.to_json()["mult"],
        "star": hatA.to_json().get("star"),
        "embeddings": {"hat_B": [_fmt_vec(v) for v in D.hatB], "hat_C": [_fmt_vec(v) for v in D.hatC],
                       "S_hat_B": [_fmt_vec(r) for r in D.S_hatB.rows],
                       "S_hat_C": [_fmt_vec(r) for r in D.S_hatC.rows]},
        "canonical_ranks": dict(sorted(DM.maps.ranks.items())),
        "counits": {"hat_B": [_fmt_vec(r) for r in DM.dual_algebroid.counits()[0].rows],
                    "hat_C": [_fmt_vec(r) for r in DM.dual_algebroid.counits()[1].rows]},
        "antipode": [_fmt_vec(r) for r in DM.dual_algebroid.antipode().rows],
        "integrals": {"hat_mu": DM.hat_mu.to_json(), "hat_phi": _fmt_vec(DM.hat_phi.functional.coefficients),
                      "hat_psi": _fmt_vec(DM.hat_psi.functional.coefficients),
                      "modular_element": _fmt_vec(DM.modular_element)},
        "checks": [c.to_json() for c in res.report.checks if c.group == "duality"],
    }


def bidual_json(model: Model, res: RunResult) -> dict:
    cert = res.bidual
    bid = res.report.get("biduality")
    iso = cert.iso if cert is not None else None
    return {
        "model": model.name,
        "isomorphic": bool(bid and bid.passed),
        "relabeling": [_fmt_vec(r) for r in iso.rows] if iso is not None else None,
        "identity": iso == Matrix.identity(iso.nrows) if iso is not None else None,
        "bidual": dual_json(model, RunResult(cert.report, cert.bidual)) if cert is not None else None,
        "checks": [c.to_json() for c in res.report.checks if c.group == "duality"],
    }


# ---------------------------------------------------------------------- commands


def _filter(rep: VerificationReport, names: Sequence[str]) -> VerificationReport:
    if not names:
        return rep
    return VerificationReport([c for c in rep.checks if c.name in names], dict(rep.summary))


def _stages(names: Sequence[str]):
    """(dual, bidual) needed for the requested check names."""
    if not names:
        return True, True
    needs_dual = any(group_of(n) in ("duality",) or n in ("groupoid-dual", "coupled-dual") for n in names)
    return needs_dual, "biduality" in names


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    model = read_model(args.path, args.scalars)
    names = args.check or []
    for n in names:
        if n not in ALL_CHECKS:
            raise InputError(f"unknown check {n!r}")
    dual, bidual = _stages(names)
    res = model.run(dual=dual, bidual=bidual)
    rep = _filter(canonical(res.report), names)
    if names and not rep.checks:
        rep.add(names[0], False, res.error or "check not applicable to this model")
    text = dumps(report_json(model, rep)) if args.format == "json" else format_text(model, rep)
    _emit(text, args.out)
    return 0 if rep.all_passed else 1


def cmd_dualize(args, bidual: bool = False) -> int:
    model = read_model(args.path, args.scalars)
    res = model.run(dual=True, bidual=bidual)
    rep = canonical(res.report)
    if res.dual is None:
        bad = [c for c in rep.failures()]
        msg = res.error or (f"dual construction failed at {bad[0].name}: {bad[0].witness}" if bad else "no dual")
        sys.stderr.write(f"{model.name}: {msg}\n")
        return 1
    res.report = rep
    payload = bidual_json(model, res) if bidual else dual_json(model, res)
    if args.format == "text":
        lines = [f"model {model.name}: dual of dimension {len(res.dual.algebra.hatA.labels)}"]
        if bidual:
            lines.append(f"isomorphic: {str(payload['isomorphic']).lower()}; relabeling is "
                         f"{'the identity' if payload['identity'] else 'not the identity'}")
        lines.append(f"canonical ranks: {payload['canonical_ranks'] if not bidual else payload['bidual']['canonical_ranks'] if payload['bidual'] else '-'}")
        text = "\n".join(lines) + "\n"
    else:
        text = dumps(payload)
    _emit(text, args.out)
    ok = all(c["pass"] for c in payload["checks"])
    if bidual:
        ok = ok and payload["isomorphic"]
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mhalgebroid", description="Verify measured multiplier Hopf algebroids and their duals.")
    sub = p.add_subparsers(dest="command", required=True)
    for nm, hlp in (("verify", "run the check suite"), ("dualize", "dump the dual structure constants"),
                    ("bidual", "certify the bidual isomorphism")):
        s = sub.add_parser(nm, help=hlp)
        s.add_argument("path")
        s.add_argument("--format", choices=("text", "json"), default="text" if nm == "verify" else "json")
        s.add_argument("--scalars", choices=("Q", "Qi", "Q_i"), default=None)
        s.add_argument("--out", default=None, metavar="FILE")
        if nm == "verify":
            s.add_argument("--check", action="append", metavar="NAME")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return 2 if ex.code else 0
    try:
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_dualize(args, bidual=args.command == "bidual")
    except InputError as ex:
        sys.stderr.write(f"error: {ex}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
