"""Command-line front end: ``farhull <command> [spec.json ...] [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import bsaut, dynamics, hull
from fractions import Fraction
from .groups import (
    BSElement,
    MembershipError,
    SpecError,
    evaluate_word,
    fitting_subgroup,
    generator_names,
    hirsch_length,
    spectrum,
)
from .serialize import SpecValidationError, load_spec, report, spec_to_dict, to_jsonable
from .torus import UnsupportedSpectrumError
from .unipotent import ENUMERATION_CAP, CapExceededError

EXIT_OK, EXIT_FAIL, EXIT_VALIDATION, EXIT_CAP = 0, 1, 2, 3

FILE_COMMANDS = ("hull", "verify-hull", "fitting", "spectrum", "hirsch", "thicken", "shadow",
                 "reidemeister", "zeta", "tame", "ssi")
BS_COMMANDS = ("aut-bs", "out-bs", "inn-bs", "verify-bs")
ENDO_COMMANDS = ("reidemeister", "zeta", "tame", "ssi")


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple = ()
    options: dict = field(default_factory=dict)
    output_format: str = "text"
    jobs: int = 1


# ---------------------------------------------------------------------------
# option parsing


def parse_images(spec, text: str | None) -> dynamics.Endomorphism:
    """``"x=x^2; t=t x"``; generators not mentioned are fixed."""
    names = generator_names(spec)
    given = {}
    for part in (text or "").split(";"):
        if not part.strip():
            continue
        name, sep, word = part.partition("=")
        name = name.strip()
        if not sep or name not in names:
            raise SpecError(f"bad image assignment {part.strip()!r}; expected <generator>=<word> with generator in {names}")
        given[name] = evaluate_word(spec, word)
    images = [given.get(nm, evaluate_word(spec, nm)) for nm in names]
    return dynamics.check_endomorphism(spec, images)


def _require(options, key, command):
    if options.get(key) is None:
        raise SpecError(f"{command} needs --{key}")
    return options[key]


# ---------------------------------------------------------------------------
# per-command results (plain data; the library calls are the source of truth)


def hull_result(spec) -> dict:
    h = hull.build_hull(spec)
    rep = hull.verify_hull_axioms(spec, h)
    return {
        "spec": spec_to_dict(spec),
        "unipotent_dim": rep.unipotent_dim,
        "hirsch_length": rep.hirsch_length,
        "torus_rank": h.torus_rank,
        "component_count": h.component_count,
        "relation_lattice": h.relation_lattice,
        "spectrum": spectrum(spec),
        "torus_generators": list(h.torus_generators),
        "axioms": {"i": rep.axiom_i, "ii": rep.axiom_ii, "iii": rep.axiom_iii, "entries_in_ZS": rep.entries_in_ZS},
        "ok": rep.ok,
    }


def verify_hull_result(spec, negative_control: bool = False) -> dict:
    h = hull.build_hull(spec)
    if negative_control:
        h = hull.inject_trivial_torus(h)
    rep = hull.verify_hull_axioms(spec, h)
    return {"negative_control": negative_control, "report": rep, "ok": rep.ok}


def fitting_result(spec) -> dict:
    fit = fitting_subgroup(spec)
    return {"description": fit.description, "hirsch_length": fit.hirsch_length,
            "generators": dict(zip(fit.names, fit.generators))}


def thicken_result(spec, m: int, cap: int) -> dict:
    th = hull.thicken(spec, m, cap)
    return {"m": m, "index": th.index, "spec": spec_to_dict(th.spec)}


def shadow_result(spec, m: int, cap: int) -> dict:
    sd = hull.unipotent_shadow(spec, m, cap=cap)
    return {
        "m_requested": sd.m_requested,
        "m": sd.m,
        "good": sd.good,
        "fitting_index": sd.index,
        "supplement": dict(zip(sd.supplement_names, sd.supplement)),
        "unipotent_parts": list(sd.unipotent_parts),
        "shadow_hirsch_length": sd.shadow.hirsch_length,
        "thickened_fitting_leads": [a for a in sd.thickened_fitting.leads if a is not None],
    }


def reidemeister_result(phi) -> dict:
    res = dynamics.reidemeister(phi)
    out = {"value": res.value if res.finite else {"infinite": True}, "certificate": res.certificate}
    out["image_index"] = dynamics.image_index(phi) if dynamics.is_injective(phi) else "non-injective"
    return out


def zeta_result(phi, terms: int) -> dict:
    z = dynamics.zeta_partial(phi, terms)
    out = {"terms": list(z.terms), "convention": z.convention, "matched_terms": z.matched_terms,
           "coefficients": list(z.coefficients), "raw_coefficients": list(z.raw_coefficients)}
    if z.numerator is not None:
        out["reconstructed"] = {"numerator": list(z.numerator), "denominator": list(z.denominator)}
    if z.raw_numerator is not None:
        out["raw_reconstructed"] = {"numerator": list(z.raw_numerator), "denominator": list(z.raw_denominator)}
    return out


def tame_result(phi) -> dict:
    t = dynamics.tame_check(phi)
    return {"tame": t.tame, "obstruction": t.obstruction, "power": t.power}


def ssi_result(phi) -> dict:
    c = dynamics.ssi_analyze(phi)
    out = {"verdict": c.verdict}
    if c.verdict == "notSSI":
        out.update(power=c.power, fixed_element=c.fixed_element, root_power=c.root_power, gamma=c.gamma,
                   verified=dynamics.verify_ssi_certificate(phi, c))
    else:
        out.update(data=c.data, reason=c.reason)
    return out


def aut_result(n: int, word: str) -> dict:
    nf = bsaut.aut_normalize(n, word)
    a, u = bsaut.normal_to_pair(n, nf)
    x, t = BSElement(Fraction(1), Fraction(1)), BSElement(Fraction(1, n), Fraction(0))
    return {"n": n, "word": word, "normal_form": nf, "normal_word": bsaut.normal_to_word(n, nf),
            "pair": {"a": a, "u": u}, "image_x": bsaut.apply_aut(n, nf, x), "image_t": bsaut.apply_aut(n, nf, t)}


def inn_result(n: int, word: str) -> dict:
    g = bsaut.inn_membership(n, bsaut.aut_normalize(n, word))
    return {"n": n, "word": word, "inner": g is not None, "conjugator": g, "convention": "h -> g h g^-1"}


def out_result(n: int, cap: int) -> dict:
    o = bsaut.out_structure(n, cap)
    return {"n": n, "finite": o.finite, "order": o.order, "free_rank": o.free_rank, "k": o.k,
            "translation_order": o.translation_order, "unit_torsion": list(o.unit_torsion),
            "description": o.describe()}


def verify_bs_result(n: int, pairs: int) -> dict:
    pres = bsaut.verify_collins_presentation(n)
    model = bsaut.verify_semidirect_model(n, pairs)
    return {"n": n, "presentation": pres, "semidirect_model": model, "ok": all(pres.values()) and model["ok"]}


def run_one(command: str, path: str | None, options: dict):
    cap = options.get("cap") or ENUMERATION_CAP
    if command in BS_COMMANDS:
        n = _require(options, "n", command)
        if command == "aut-bs":
            return aut_result(n, _require(options, "word", command))
        if command == "inn-bs":
            return inn_result(n, _require(options, "word", command))
        if command == "out-bs":
            return out_result(n, cap)
        return verify_bs_result(n, options.get("pairs") or 200)
    spec = load_spec(path)
    if command == "hull":
        return hull_result(spec)
    if command == "verify-hull":
        return verify_hull_result(spec, bool(options.get("negative_control")))
    if command == "fitting":
        return fitting_result(spec)
    if command == "spectrum":
        return {"spectrum": spectrum(spec)}
    if command == "hirsch":
        return {"hirsch_length": hirsch_length(spec)}
    if command == "thicken":
        return thicken_result(spec, _require(options, "m", command), cap)
    if command == "shadow":
        return shadow_result(spec, _require(options, "m", command), cap)
    phi = parse_images(spec, options.get("images"))
    if command == "reidemeister":
        return reidemeister_result(phi)
    if command == "zeta":
        return zeta_result(phi, options.get("terms") or 6)
    if command == "tame":
        return tame_result(phi)
    return ssi_result(phi)


def _success(command: str, result) -> bool:
    if command in ("verify-hull", "verify-bs"):
        return bool(result["ok"])
    return True


def run(config: RunConfig) -> tuple[int, list]:
    """Execute a command; returns (exit status, list of JSON-ready reports)."""
    if config.command in BS_COMMANDS:
        paths = [None]
    else:
        if not config.inputs:
            raise SpecError(f"{config.command} needs at least one spec file")
        paths = list(config.inputs)
    if config.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as ex:
            results = list(ex.map(run_one, [config.command] * len(paths), paths, [config.options] * len(paths)))
    else:
        results = [run_one(config.command, p, config.options) for p in paths]
    reports = []
    for p, res in zip(paths, results):
        rep = report(config.command, res)
        if p is not None:
            rep["input"] = p
        reports.append(rep)
    status = EXIT_OK if all(_success(config.command, r) for r in results) else EXIT_FAIL
    return status, reports


# ---------------------------------------------------------------------------
# text rendering


def _text(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
        return lines
    if isinstance(value, list):
        if _flat(value):
            return [pad + _inline(value)]
        lines = []
        for v in value:
            sub = _text(v, indent + 1)
            lines.append(pad + "- " + sub[0].lstrip())
            lines += sub[1:]
        return lines
    return [pad + _inline(value)]


def _flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, dict) and (not isinstance(x, list) or _flat(x)) for x in v)
    return not isinstance(v, dict)


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def render(reports: list, fmt: str) -> str:
    if fmt == "json":
        body = reports[0] if len(reports) == 1 else reports
        return json.dumps(body, sort_keys=True, indent=2)
    chunks = []
    for rep in reports:
        head = f"== {rep['command']}" + (f" {rep['input']}" if "input" in rep else "")
        chunks.append("\n".join([head] + _text(rep["result"])))
    return "\n\n".join(chunks)


# ---------------------------------------------------------------------------
# argparse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="farhull", description="Algebraic hulls and endomorphism dynamics for FAR groups.")
    p.add_argument("command", choices=FILE_COMMANDS + BS_COMMANDS)
    p.add_argument("inputs", nargs="*", help="group spec JSON files")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--jobs", type=int, default=1, help="worker processes when several spec files are given")
    p.add_argument("--cap", type=int, default=None, help=f"enumeration cap (default {ENUMERATION_CAP})")
    p.add_argument("--terms", "-N", type=int, default=None, help="zeta: number of terms (default 6)")
    p.add_argument("-m", type=int, default=None, help="thicken/shadow: root order m")
    p.add_argument("--images", default=None, help='endomorphism, e.g. "x=x^2; t=t x"')
    p.add_argument("--word", default=None, help='BS automorphism word, e.g. "C T Q1^-2"')
    p.add_argument("--n", type=int, default=None, help="BS(1,n) parameter for the *-bs commands")
    p.add_argument("--pairs", type=int, default=None, help="verify-bs: random pairs (default 200)")
    p.add_argument("--negative-control", action="store_true", help="verify-hull: inject a trivial torus factor")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    options = {"m": args.m, "images": args.images, "word": args.word, "n": args.n, "terms": args.terms,
               "cap": args.cap, "pairs": args.pairs, "negative_control": args.negative_control}
    config = RunConfig(args.command, tuple(args.inputs), options, args.format, args.jobs)
    try:
        if args.m is not None and args.m < 1:
            raise SpecError("-m must be positive")
        status, reports = run(config)
    except CapExceededError as exc:
        print(f"error: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (SpecError, SpecValidationError, MembershipError, dynamics.RelationError,
            dynamics.UnsupportedEndomorphismError, dynamics.InfiniteTermError, hull.NonInjectiveError,
            UnsupportedSpectrumError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(render(reports, args.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
