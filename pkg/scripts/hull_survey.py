"""Build and verify hulls for a list of spec files; print a table of invariants and timings."""

import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path

from farhull.hull import build_hull, inject_trivial_torus, verify_hull_axioms
from farhull.serialize import load_spec

EXAMPLES = Path(__file__).resolve().parent.parent / "docs" / "examples"


@dataclass
class SurveyConfig:
    specs: list[Path] = field(default_factory=lambda: sorted(EXAMPLES.glob("*.json")))
    negative_control: bool = False


def run(cfg: SurveyConfig) -> None:
    print(f"{'spec':<18} {'h':>3} {'dim U':>6} {'torus':>6} {'axioms':>7} {'secs':>6}")
    for path in cfg.specs:
        spec = load_spec(path)
        t0 = time.perf_counter()
        hull = build_hull(spec)
        if cfg.negative_control:
            hull = inject_trivial_torus(hull)
        rep = verify_hull_axioms(spec, hull)
        dt = time.perf_counter() - t0
        ok = "ok" if rep.ok else "FAIL"
        print(f"{path.stem:<18} {rep.hirsch_length:>3} {rep.unipotent_dim:>6} {hull.torus_rank:>6} {ok:>7} {dt:>6.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("specs", nargs="*", type=Path)
    ap.add_argument("--negative-control", action="store_true", help="inject a trivial torus factor (axioms should fail)")
    args = ap.parse_args()
    cfg = SurveyConfig(negative_control=args.negative_control)
    if args.specs:
        cfg.specs = args.specs
    run(cfg)
