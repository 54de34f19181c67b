"""Reidemeister numbers of iterates and the reconstructed zeta function for a few endomorphisms."""

import argparse
from dataclasses import dataclass
from pathlib import Path

from farhull import dynamics as dy
from farhull.cli import parse_images
from farhull.exact import poly_str
from farhull.serialize import load_spec

EXAMPLES = Path(__file__).resolve().parent.parent / "docs" / "examples"

CASES = [
    ("z2.json", "g1=g1^2 g2; g2=g1 g2", "hyperbolic [[2,1],[1,1]]"),
    ("z2.json", "g1=g1^2; g2=g2^2", "dilation 2I"),
    ("z_half.json", "g1=g1^3", "x3 on Z[1/2]"),
    ("heisenberg.json", "g1=g1^2; g2=g2^2", "Heisenberg dilation"),
]


@dataclass
class ZetaConfig:
    terms: int = 8


def run(cfg: ZetaConfig) -> None:
    for fname, images, label in CASES:
        spec = load_spec(EXAMPLES / fname)
        phi = parse_images(spec, images)
        z = dy.zeta_partial(phi, cfg.terms)
        print(f"{label}")
        print(f"  R(phi^k)  = {list(z.terms)}")
        if z.numerator is None:
            print("  zeta      = not determined from these terms")
        else:
            print(f"  zeta      = ({poly_str(z.numerator, 'z')}) / ({poly_str(z.denominator, 'z')})"
                  f"  (matches {z.matched_terms} terms)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-N", "--terms", type=int, default=8)
    run(ZetaConfig(ap.parse_args().terms))
