"""Command-line front end: verify fixtures, compute constructions, run the mirror pipeline."""

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from tqdm import tqdm

from src.algebra.checks import check_ainf, check_hom, check_ud_membership
from src.algebra.operators import OperatorSystem
from src.algebra.reports import VerificationReport
from src.config import get_settings
from src.errors import DataError, FixtureError, NovikovAinfError
from src.fixtures import (
    dump_system,
    load_bundle,
    load_complex,
    load_contraction,
    load_hom,
    load_inner_product,
    load_isotopy,
    load_system,
    read_json,
)
from src.geometry import validate_complex
from src.isotopy import PseudoIsotopy, check_isotopy, integrate
from src.labels import LabelGroup
from src.mirror import (
    Atlas,
    cocycle_verify,
    eval_series,
    gluing_hom,
    glue_atlas,
    torus_point,
    val_compatibility_check,
    wall_crossing_verify,
)
from src.mirror.cocycle import identity_verify
from src.mirror.gluing import TransitionData
from src.novikov import parse_rational
from src.transfer.canonical import canonical_model
from src.transfer.contraction import check_contraction
from src.transfer.harmonic import harmonic_contraction
from src.trees import enumerate_trees, tree_to_string

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
VERIFY_KINDS = ("ainf", "hom", "ud", "isotopy", "contraction", "complex")
COMPUTE_KINDS = (
    "canonical-model",
    "integrate-isotopy",
    "harmonic-contraction",
    "mc-series",
    "glue",
    "superpotential",
    "trees",
)


def create_argument_parser() -> argparse.ArgumentParser:
    """Creates and configures the argument parser for the script."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print the report as JSON on stdout.")
    common.add_argument("--emax", help="Lower the energy cutoff E_max (p/q).")
    common.add_argument("--kmax", type=int, help="Lower the length cutoff K_max.")
    common.add_argument("--threads", type=int, help="Worker threads for per-(k, beta) checks.")
    common.add_argument("--config", default="config.json", help="Path to the configuration file.")

    parser = argparse.ArgumentParser(description="Exact verification of gapped A-infinity data and mirror charts.")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="Run a checker on a fixture.")
    verify.add_argument("kind", choices=VERIFY_KINDS)
    verify.add_argument("fixture", help="Path to the fixture JSON.")

    compute = sub.add_parser("compute", parents=[common], help="Run a construction and print its result.")
    compute.add_argument("kind", choices=COMPUTE_KINDS)
    compute.add_argument("fixture", nargs="?", help="Path to the fixture JSON.")
    compute.add_argument("--a", default="0", help="Lower isotopy parameter.")
    compute.add_argument("--b", default="1", help="Upper isotopy parameter.")
    compute.add_argument("--k", type=int, default=2, help="Number of tree inputs.")
    compute.add_argument("--beta", default="0", help="Decoration class as comma-separated integers, or 0.")
    compute.add_argument(
        "--point",
        action="append",
        default=[],
        help="CHART:v1,v2,... evaluates W at (T^v1, ..., T^vn); repeatable.",
    )

    pipeline = sub.add_parser("pipeline", parents=[common], help="Assemble and verify a full chart bundle.")
    pipeline.add_argument("fixture", nargs="?", help="Path to the bundle JSON; defaults to config.json.")
    return parser


def load_config(config_path: str) -> dict:
    """Loads the configuration from a JSON file."""
    path = Path(config_path)
    if not path.exists():
        return {}
    with path.open("r", encoding="utf-8") as f:
        return json.load(f)


# Re-truncation


def _clamped(current, requested):
    if requested is None:
        return None
    requested = parse_rational(requested) if not isinstance(requested, int) else requested
    return min(current, requested)


def _retruncate_system(system: OperatorSystem, emax, kmax) -> OperatorSystem:
    ctx = system.context
    return system.restrict_energy(_clamped(ctx.energy_cutoff, emax), _clamped(ctx.length_cutoff, kmax))


def retruncate(obj, emax=None, kmax=None):
    """Lowers the cutoffs of loaded data; requests above the stored cutoffs are ignored."""
    if emax is None and kmax is None:
        return obj
    if isinstance(obj, OperatorSystem):
        return _retruncate_system(obj, emax, kmax)
    if isinstance(obj, PseudoIsotopy):
        return PseudoIsotopy(_retruncate_system(obj.m, emax, kmax), _retruncate_system(obj.c, emax, kmax))
    if isinstance(obj, tuple) and len(obj) == 3 and all(isinstance(x, OperatorSystem) for x in obj):
        return tuple(_retruncate_system(x, emax, kmax) for x in obj)
    if isinstance(obj, tuple) and len(obj) == 4:
        charts, transitions, complex_, witnesses = obj
        moved = {c.name: dataclasses.replace(c, m=_retruncate_system(c.m, emax, kmax)) for c in charts}
        rebuilt = [
            TransitionData(
                moved[t.source.name], moved[t.target.name], t.f_star, t.shift, _retruncate_system(t.C, emax, kmax), t.overlap
            )
            for t in transitions
        ]
        return list(moved.values()), rebuilt, complex_, witnesses
    return obj


def _fixture(path: Optional[str], loader, args):
    if path is None:
        raise FixtureError("no fixture given")
    data = read_json(path)
    if isinstance(data, dict) and "builtin" in data and (args.emax or args.kmax):
        params = dict(data.get("params", {}))
        if args.emax:
            params["energy_cutoff"] = args.emax
        if args.kmax:
            params["length_cutoff"] = args.kmax
        data = {**data, "params": params}
    return retruncate(loader(data), args.emax, args.kmax)


# Output


def emit(payload: dict, as_json: bool):
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    report = payload.get("report")
    if report is not None:
        print(VerificationReport.model_validate(report).summary())
        for failure in report.get("failures", [])[:20]:
            print(f"  {failure['label']}: {failure['detail']}")
    for key, value in payload.items():
        if key != "report":
            print(f"{key}: {json.dumps(value, sort_keys=True) if not isinstance(value, str) else value}")


# Commands


def cmd_verify(args, threads: int) -> int:
    kind = args.kind
    if kind == "ainf":
        report = check_ainf(_fixture(args.fixture, load_system, args), threads)
    elif kind == "hom":
        f, m_src, m_tgt = _fixture(args.fixture, load_hom, args)
        report = check_hom(f, m_src, m_tgt, threads)
    elif kind == "ud":
        data = read_json(args.fixture)
        if isinstance(data, dict) and "f" in data:
            f, m_src, m_tgt = _fixture(args.fixture, load_hom, args)
            report = check_ud_membership(f, m_src, m_tgt, threads)
        else:
            report = check_ud_membership(_fixture(args.fixture, load_system, args), threads=threads)
    elif kind == "isotopy":
        report = check_isotopy(_fixture(args.fixture, load_isotopy, args))
    elif kind == "contraction":
        report = check_contraction(_fixture(args.fixture, load_contraction, args))
    else:
        report = validate_complex(_fixture(args.fixture, load_complex, args))
    report.metadata.setdefault("seed", get_settings().seed)
    emit({"report": report.model_dump()}, args.json)
    return EXIT_PASS if report.passed else EXIT_FAIL


def _canonical_model(args) -> dict:
    data = read_json(args.fixture)
    if not isinstance(data, dict) or "algebra" not in data:
        raise FixtureError("canonical-model expects {'algebra': ..., 'contraction' or 'inner_product': ...}")
    m = retruncate(load_system(data["algebra"]), args.emax, args.kmax)
    if "contraction" in data:
        con = load_contraction(data["contraction"])
    elif "inner_product" in data:
        con = harmonic_contraction(load_inner_product(data["inner_product"]))
    else:
        raise FixtureError("canonical-model needs a contraction or an inner product")
    m_can, i_can = canonical_model(m, con)
    report = VerificationReport(name="canonical model")
    report.merge(check_ainf(m_can))
    report.merge(check_hom(i_can, m_can, m))
    return {"model": dump_system(m_can), "inclusion": dump_system(i_can), "report": report.model_dump()}


def _trees(args) -> dict:
    beta = () if args.beta.strip() in ("0", "") else tuple(int(x) for x in args.beta.split(","))
    if beta and args.fixture:
        system = _fixture(args.fixture, load_system, args)
        labels, cutoff = system.labels, system.context.energy_cutoff
    elif beta:
        raise FixtureError("a nonzero decoration class needs a fixture with a label group")
    else:
        labels, cutoff = LabelGroup((), (), (), ()), get_settings().energy_cutoff
    trees = enumerate_trees(args.k, beta, labels.support_set(cutoff))
    return {"k": args.k, "beta": list(beta), "count": len(trees), "trees": [tree_to_string(t) for t in trees]}


def _superpotential(args) -> dict:
    charts, _, _, _ = _fixture(args.fixture, load_bundle, args)
    by_name = {c.name: c for c in charts}
    values = []
    for option in args.point:
        name, _, coordinates = option.partition(":")
        if name not in by_name:
            raise FixtureError(f"unknown chart {name!r} in --point")
        chart = by_name[name]
        point = torus_point(chart.context, [x for x in coordinates.split(",") if x])
        value = eval_series(chart.series[1], point)
        values.append({"chart": name, "point": coordinates, "W": value.to_json()})
    return {
        "superpotentials": {c.name: c.series[1].to_json() for c in charts},
        "values": values,
    }


def cmd_compute(args, threads: int) -> int:
    kind = args.kind
    if kind == "trees":
        payload = _trees(args)
    elif kind == "canonical-model":
        payload = _canonical_model(args)
    elif kind == "integrate-isotopy":
        M = _fixture(args.fixture, load_isotopy, args)
        payload = {"homomorphism": dump_system(integrate(M, args.a, args.b)), "a": args.a, "b": args.b}
    elif kind == "harmonic-contraction":
        payload = {"contraction": harmonic_contraction(_fixture(args.fixture, load_inner_product, args)).to_json()}
    elif kind == "mc-series":
        charts, _, _, _ = _fixture(args.fixture, load_bundle, args)
        payload = {}
        for chart in charts:
            P, W, Q = chart.series
            payload[chart.name] = {
                "P": {chart.space.names[i]: s.to_json() for i, s in sorted(P.items())},
                "W": W.to_json(),
                "Q": {chart.space.names[i]: s.to_json() for i, s in sorted(Q.items())},
            }
    elif kind == "glue":
        charts, transitions, complex_, witnesses = _fixture(args.fixture, load_bundle, args)
        atlas = glue_atlas(charts, transitions, complex_, witnesses, threads)
        payload = atlas.to_json()
    else:
        payload = _superpotential(args)
    emit(payload, args.json)
    report = payload.get("report")
    if report is not None and not report.get("passed", True):
        return EXIT_FAIL
    return EXIT_PASS


class StageFailure(Exception):
    def __init__(self, stage: str, detail: str):
        super().__init__(f"{stage}: {detail}")
        self.stage = stage
        self.detail = detail


def _stage(stage: str, report: VerificationReport, summary: list):
    summary.append({"stage": stage, "checked": report.checked, "passed": report.passed})
    if not report.passed:
        failure = report.first_failure
        raise StageFailure(stage, f"{failure.label}: {failure.detail}")


def run_pipeline(bundle: tuple, threads: int = 1, progress: bool = True) -> tuple:
    """
    Charts, gluing maps, transitions, valuation, wall crossing, cocycles, atlas.

    Returns:
        (atlas, summary rows)

    Raises:
        StageFailure: at the first failing stage
    """
    charts, transitions, complex_, witnesses = bundle
    summary: list = []
    report = VerificationReport(name="pipeline")

    def run(stage, fn, items):
        sub = VerificationReport(name=stage)
        for item in tqdm(items, desc=stage, unit="item", disable=not progress, file=sys.stderr):
            try:
                sub.merge(fn(item))
            except NovikovAinfError as e:
                raise StageFailure(stage, f"{type(e).__name__}: {e}") from e
        report.merge(sub)
        _stage(stage, sub, summary)

    if complex_ is not None:
        run("complex", validate_complex, [complex_])
    run("charts", lambda c: VerificationReport(name=c.name).merge(c.verify(threads)).merge(identity_verify(c)), charts)
    maps = {}

    def glue(t):
        maps[t.name] = gluing_hom(t)
        return VerificationReport(name=f"gluing {t.name}", checked=1)

    run("gluing", glue, transitions)
    run("transitions", lambda t: t.verify(threads), transitions)
    run("valuation", lambda t: val_compatibility_check(t, phi=maps[t.name]), transitions)
    run("wall crossing", lambda t: wall_crossing_verify(t, phi=maps[t.name]), transitions)
    table = {(t.target.name, t.source.name): t for t in transitions}
    names = sorted(c.name for c in charts)
    triangles = [
        (i, j, k)
        for i in names
        for j in names
        for k in names
        if len({i, j, k}) == 3 and (i, j) in table and (j, k) in table and (i, k) in table
    ]
    run(
        "cocycle",
        lambda ijk: cocycle_verify(table[ijk[:2]], table[ijk[1:]], table[(ijk[0], ijk[2])], witnesses.get(ijk)),
        triangles,
    )
    atlas = Atlas({c.name: c for c in charts}, table, report, {c.name: c.series[1] for c in charts})
    summary.append({"stage": "atlas", "checked": len(charts), "passed": True})
    return atlas, summary


def cmd_pipeline(args, threads: int, config: dict) -> int:
    path = args.fixture or config.get("pipeline")
    bundle = _fixture(path, load_bundle, args)
    try:
        atlas, summary = run_pipeline(bundle, threads, progress=not args.json)
    except StageFailure as e:
        logger.error(f"Pipeline failed at stage {e.stage}: {e.detail}")
        emit({"stage": e.stage, "detail": e.detail, "passed": False}, args.json)
        return EXIT_FAIL
    payload = atlas.to_json()
    payload["summary"] = summary
    emit(payload, args.json)
    return EXIT_PASS


def main(argv=None) -> int:
    parser = create_argument_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%H:%M:%S',
        stream=sys.stderr,
    )
    config = load_config(args.config)
    threads = args.threads or config.get("threads") or settings.threads
    try:
        if args.command == "verify":
            return cmd_verify(args, threads)
        if args.command == "compute":
            return cmd_compute(args, threads)
        return cmd_pipeline(args, threads, config)
    except (FixtureError, DataError) as e:
        logger.error(f"Input error: {e}")
        return EXIT_INPUT
    except NovikovAinfError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
