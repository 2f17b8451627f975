"""Build partial-information plots for the standard model gallery.

Writes one CSV per model into the output directory, all at comparable
environment sizes so the plateau shapes can be overlaid directly:
perfect records (step), weak central-spin records (rounded plateau),
Haar-random global state (straight line to the half point), photon
halo (same plateau from a continuous-variable origin).
"""
import argparse
import math
import pathlib

import numpy as np

from darwinlab.darwin import (BranchingSource, PhotonSource, build_pip,
                              haar_random_source, pip_to_csv)
from darwinlab.spinmodels import (CentralSpinParams, central_spin_branching,
                                  cnot_model, uniform_couplings)


def sources(n, seed):
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x6A11)))
    a = 1.0 / math.sqrt(2.0)
    yield "cnot", BranchingSource(cnot_model(a, a, n), tag="cnot")
    params = CentralSpinParams(couplings=uniform_couplings(rng, n), t=1.0)
    yield "central_spin", BranchingSource(central_spin_branching(params))
    yield "haar", haar_random_source(min(n, 12), seed)
    yield "photon", PhotonSource(math.exp(-8.0), n_env=n)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=24, help="environment size")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=48, help="fragments per size")
    ap.add_argument("--out", default="gallery", help="output directory")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, src in sources(args.n, args.seed):
        pip = build_pip(src, samples_per_fraction=args.samples, seed=args.seed)
        path = out / f"{name}.csv"
        path.write_text(pip_to_csv(pip), encoding="utf-8", newline="\n")
        print(f"{name}: H_S = {pip.h_system:.4f} nats -> {path}")


if __name__ == "__main__":
    main()
