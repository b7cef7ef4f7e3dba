"""Command line front-end: ``gl1n <verb> [target] [physics] [--output ...]``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import tomli

from . import chain
from .gz import (
    DimensionError,
    HighestWeight,
    NotUnitaryError,
    classify_unitary,
    enumerate_basis,
    fock_dimension,
    ladder_dimension,
)
from .matrices import Representation, export_coo, export_exact, from_sparse, odd_sparse
from .odd import branch, eigenvectors, momentum_variant, spectrum
from .scalars import rational_to_str
from .verify import run_chain_suites, run_suites

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 2, 3
CONFIG_KEYS = {"n", "mu", "omega", "c", "hbar", "rep", "p", "m_top", "r", "observable"}


class UsageError(ValueError):
    pass


@dataclass
class Target:
    kind: str  # "fock", "ladder" or "general"
    hw: HighestWeight
    p: int | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "highest_weight": [rational_to_str(x) for x in self.hw.m_top],
            "unitarity": str(classify_unitary(self.hw)),
        }


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _list(text: str) -> list[str]:
    return [t for t in text.replace("[", "").replace("]", "").replace(" ", "").split(",") if t]


def load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        data = tomli.load(fh)
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    tgt = common.add_argument_group("representation")
    tgt.add_argument("--hw", help="highest weight m_0,...,m_n (rationals allowed, e.g. 1/2)")
    tgt.add_argument("--fock", type=int, metavar="P", help="Fock representation W(P)")
    tgt.add_argument("--ladder", type=int, metavar="P", help="ladder representation V(P)")
    tgt.add_argument("--n", type=int, help="number of oscillators (required with --fock/--ladder)")
    tgt.add_argument("--config", help="TOML file with n, mu, omega, c, hbar, rep, p or m_top")
    phys = common.add_argument_group("physics")
    phys.add_argument("--mu", type=float)
    phys.add_argument("--omega", type=float)
    phys.add_argument("--c", type=float)
    phys.add_argument("--hbar", type=float)
    phys.add_argument("--r", type=int, help="oscillator index (default 1)")
    phys.add_argument("--observable", choices=chain.OBSERVABLES)
    phys.add_argument("--alpha", help="explicit odd element coefficients, e.g. 1,0.5+2j")
    common.add_argument("--output", choices=("json", "csv", "table"), default="table")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="gl1n", description="gl(1|n) representations and Wigner chain spectra")
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues with multiplicities")
    ev = sub.add_parser("eigvecs", parents=[common], help="eigenvectors expanded in the GZ basis")
    ev.add_argument("--generic", action="store_true", help="skip the Fock/ladder closed forms")
    pr = sub.add_parser("probs", parents=[common], help="measurement probabilities in stationary states")
    pr.add_argument("--state", help="Fock state bits, e.g. 1,0,1")
    pr.add_argument("--state-index", type=int, help="basis index of the stationary state")
    sub.add_parser("dims", parents=[common], help="dimension of the representation")
    sub.add_parser("branch", parents=[common], help="gl(1|1)+gl(n-1) branching components")
    vf = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    vf.add_argument("--pairs", type=int, default=40, help="sampled bracket pairs (0 for all)")
    sub.add_parser("energy", parents=[common], help="stationary state energies")
    mx = sub.add_parser("matrix", parents=[common], help="export a generator or observable matrix")
    mx.add_argument("--element", help="generator e_ij as i,j (default: the observable)")
    mx.add_argument("--format", choices=("coo", "exact"), default="coo")
    return parser


def resolve(args: argparse.Namespace) -> tuple[Target, dict]:
    cfg = load_config(args.config) if args.config else {}
    n = args.n if args.n is not None else cfg.get("n")
    chosen = [x for x in ("hw", "fock", "ladder") if getattr(args, x) is not None]
    if len(chosen) > 1:
        raise UsageError("give only one of --hw, --fock, --ladder")
    if chosen:
        kind = {"hw": "general"}.get(chosen[0], chosen[0])
        value = getattr(args, chosen[0])
    elif "rep" in cfg:
        kind = cfg["rep"]
        if kind not in ("fock", "ladder", "general"):
            raise UsageError(f"unknown rep {kind!r}")
        value = cfg.get("m_top") if kind == "general" else cfg.get("p")
        if value is None:
            raise UsageError(f"config rep={kind} needs {'m_top' if kind == 'general' else 'p'}")
    else:
        raise UsageError("no representation given (use --hw, --fock, --ladder or --config)")

    if kind == "general":
        labels = _list(value) if isinstance(value, str) else list(value)
        hw = HighestWeight.of(labels)
        if n is not None and n != hw.n:
            raise UsageError(f"--n {n} does not match a highest weight with {hw.n + 1} labels")
        target = Target("general", hw)
    else:
        if n is None:
            raise UsageError(f"--{kind} needs --n")
        p = int(value)
        if p < 0:
            raise UsageError("p must be nonnegative")
        hw = HighestWeight.fock(n, p) if kind == "fock" else HighestWeight.ladder(n, p)
        target = Target(kind, hw, p)
    phys = {k: cfg[k] for k in ("mu", "omega", "c", "hbar", "r", "observable") if k in cfg}
    for k in ("mu", "omega", "c", "hbar", "r", "observable"):
        if getattr(args, k) is not None:
            phys[k] = getattr(args, k)
    if phys.get("observable", "position") not in chain.OBSERVABLES:
        raise UsageError(f"unknown observable {phys['observable']!r}")
    return target, phys


def chain_config(target: Target, phys: dict) -> chain.ChainConfig:
    keys = {k: float(phys[k]) for k in ("mu", "omega", "c", "hbar") if k in phys}
    return chain.ChainConfig(target.hw.n, **keys)


@dataclass
class OddChoice:
    alpha: np.ndarray
    scale: float
    coeffs: np.ndarray
    observable: str | None
    r: int


def odd_choice(args, target: Target, phys: dict) -> OddChoice:
    r = int(phys.get("r", 1))
    if args.alpha:
        alpha = np.array([complex(t) for t in _list(args.alpha)])
        if alpha.size != target.hw.n:
            raise UsageError(f"--alpha needs {target.hw.n} coefficients")
        if not np.any(alpha):
            raise UsageError("--alpha must not vanish")
        return OddChoice(alpha, float(np.linalg.norm(alpha)), alpha, None, r)
    if target.hw.n < 2:
        raise UsageError("the oscillator chain needs n >= 2; pass --alpha for n = 1")
    obs = phys.get("observable", "position")
    op = chain.observable_operator(chain_config(target, phys), r, obs)
    return OddChoice(op.alpha, op.scale, op.coeffs, obs, r)


# ------------------------------------------------------------------ output


def emit(out, fmt_name: str, payload: dict, header: Sequence[str], rows: list[Sequence], table: str | None = None):
    if fmt_name == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    elif fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) if isinstance(x, float) else x for x in row])
        out.write(buf.getvalue())
    else:
        if table is not None:
            out.write(table)
            return
        cells = [list(header)] + [[fmt(x) if isinstance(x, float) else str(x) for x in row] for row in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        for r in cells:
            out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def cmd_spectrum(args, target, phys, out):
    odd = odd_choice(args, target, phys)
    rep = spectrum(target.hw, odd.alpha, odd.scale)
    levels = [
        {"value": lv.value, "multiplicity": lv.multiplicity, "k": None if lv.k is None else rational_to_str(lv.k)}
        for lv in rep.levels
    ]
    payload = {
        "verb": "spectrum",
        "representation": target.to_json(),
        "observable": odd.observable,
        "r": odd.r,
        "scale": odd.scale,
        "dimension": rep.dimension,
        "levels": levels,
    }
    rows = [(lv["value"], lv["multiplicity"], lv["k"]) for lv in levels]
    emit(out, args.output, payload, ("value", "multiplicity", "k"), rows)
    return EXIT_OK


def _eigen_vectors(args, target, phys, odd: OddChoice, rep: Representation):
    if target.kind != "general" and odd.observable and not getattr(args, "generic", False):
        cfg = chain_config(target, phys)
        if target.kind == "fock":
            return chain.fock_eigenvectors(target.p, cfg, odd.r, rep, odd.observable)
        return chain.ladder_eigen(target.p, cfg, odd.r, rep, odd.observable)[1]
    if odd.observable == "momentum":
        return momentum_variant(target.hw, odd.coeffs, rep=rep).vectors
    return eigenvectors(target.hw, odd.alpha, rep=rep).vectors


def cmd_eigvecs(args, target, phys, out):
    odd = odd_choice(args, target, phys)
    rep = Representation(target.hw)
    vectors = _eigen_vectors(args, target, phys, odd, rep)
    items, rows = [], []
    for idx, v in enumerate(vectors):
        coeffs = []
        for pat, z in v.expansion(1e-14).items():
            coeffs.append({"pattern": pat.key(), "re": z.real, "im": z.imag})
            rows.append((idx, v.eigenvalue, pat.key(), z.real, z.imag))
        items.append({"index": idx, "eigenvalue": v.eigenvalue, "coefficients": coeffs})
    payload = {
        "verb": "eigvecs",
        "representation": target.to_json(),
        "observable": odd.observable,
        "r": odd.r,
        "scale": odd.scale,
        "vectors": items,
    }
    emit(out, args.output, payload, ("vector", "eigenvalue", "pattern", "re", "im"), rows)
    return EXIT_OK


def _group_by_level(dist: dict[float, float], levels) -> dict[float, float]:
    out = {lv.value: 0.0 for lv in levels}
    for lam, prob in dist.items():
        nearest = min(out, key=lambda x: abs(x - lam))
        out[nearest] += prob
    return out


def cmd_probs(args, target, phys, out):
    odd = odd_choice(args, target, phys)
    rep = Representation(target.hw)
    basis = rep.basis
    if args.state is not None:
        if target.kind != "fock":
            raise UsageError("--state takes Fock bits; use --state-index for other representations")
        bits = tuple(int(b) for b in _list(args.state))
        index = chain.fock_index(basis)
        if bits not in index:
            raise UsageError(f"{list(bits)} is not a basis state of W({target.p})")
        indices = [index[bits]]
    elif args.state_index is not None:
        if not 0 <= args.state_index < rep.dim:
            raise UsageError(f"--state-index must be in [0, {rep.dim})")
        indices = [args.state_index]
    else:
        indices = list(range(rep.dim))

    levels = spectrum(target.hw, odd.alpha, odd.scale).levels
    closed = target.kind == "fock" and odd.observable is not None
    vectors = None if closed else _eigen_vectors(args, target, phys, odd, rep)
    states, rows = [], []
    for i in indices:
        pat = basis[i]
        if closed:
            st = chain.fock_state(pat)
            dist = chain.fock_probabilities(target.p, chain_config(target, phys), st, odd.r, odd.observable)
            label = ",".join(map(str, st.phi))
        else:
            dist = chain.overlap_probabilities(vectors, i)
            label = str(i)
        dist = _group_by_level(dist, levels)
        entries = [{"value": v, "probability": prob} for v, prob in sorted(dist.items()) if prob > 1e-15]
        states.append({"state": label, "pattern": pat.key(), "distribution": entries})
        rows += [(label, e["value"], e["probability"]) for e in entries]
    payload = {
        "verb": "probs",
        "representation": target.to_json(),
        "observable": odd.observable,
        "r": odd.r,
        "method": "closed_form" if closed else "overlap",
        "states": states,
    }
    emit(out, args.output, payload, ("state", "value", "probability"), rows)
    return EXIT_OK


def cmd_dims(args, target, phys, out):
    dim = len(enumerate_basis(target.hw))
    if target.kind == "fock":
        formula = fock_dimension(target.hw.n, target.p)
    elif target.kind == "ladder":
        formula = ladder_dimension(target.hw.n, target.p)
    else:
        formula = sum(c.dimension for c in branch(target.hw))
    payload = {"verb": "dims", "representation": target.to_json(), "dimension": dim, "formula": formula}
    emit(out, args.output, payload, ("dimension", "formula"), [(dim, formula)], table=f"{dim}\n")
    return EXIT_OK


def cmd_branch(args, target, phys, out):
    comps, rows = [], []
    for c in branch(target.hw):
        item = {
            "gl11_weight": [rational_to_str(x) for x in c.gl1_weight],
            "gln1_label": [rational_to_str(x) for x in c.gln1_label],
            "gln1_dim": c.gln1_dim,
            "N": c.N,
            "singlet": c.singlet,
            "k": rational_to_str(c.k_value),
            "dimension": c.dimension,
        }
        comps.append(item)
        rows.append(
            (
                "(" + ",".join(item["gl11_weight"]) + ")",
                "[" + ",".join(item["gln1_label"]) + "]",
                c.gln1_dim,
                c.N,
                item["k"],
                c.dimension,
            )
        )
    payload = {"verb": "branch", "representation": target.to_json(), "components": comps}
    emit(out, args.output, payload, ("gl11_weight", "gln1_label", "gln1_dim", "N", "k", "dimension"), rows)
    return EXIT_OK


def cmd_verify(args, target, phys, out):
    pairs = None if args.pairs == 0 else args.pairs
    if target.kind == "general":
        suites = run_suites(target.hw, args.seed, pairs)
    else:
        if target.hw.n < 2:
            raise UsageError("chain suites need n >= 2")
        obs = phys.get("observable", "position")
        suites = run_chain_suites(
            target.kind, target.hw.n, target.p, chain_config(target, phys), int(phys.get("r", 1)), obs, args.seed
        )
    passed = all(s.passed for s in suites)
    payload = {
        "verb": "verify",
        "representation": target.to_json(),
        "seed": args.seed,
        "passed": passed,
        "suites": [s.to_json() for s in suites],
    }
    rows = [(s.name, "pass" if s.passed else "FAIL", s.checked) for s in suites]
    emit(out, args.output, payload, ("suite", "status", "checked"), rows)
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_energy(args, target, phys, out):
    if target.hw.n < 2:
        raise UsageError("energies need the chain, n >= 2")
    cfg = chain_config(target, phys)
    md = chain.mode_data(cfg)
    basis = enumerate_basis(target.hw)
    energies = chain.stationary_energies(basis, [float(b) for b in md.beta_j], cfg.hbar)
    states = [{"index": i, "pattern": p.key(), "energy": float(e)} for i, (p, e) in enumerate(zip(basis, energies))]
    payload = {"verb": "energy", "representation": target.to_json(), "hbar": cfg.hbar, "states": states}
    rows = [(s["index"], s["pattern"], s["energy"]) for s in states]
    emit(out, args.output, payload, ("index", "pattern", "energy"), rows)
    return EXIT_OK


def cmd_matrix(args, target, phys, out):
    rep = Representation(target.hw)
    if args.element:
        i, j = (int(t) for t in _list(args.element))
        if not (0 <= i <= rep.n and 0 <= j <= rep.n):
            raise UsageError(f"indices must lie in 0..{rep.n}")
        m = rep.e(i, j)
        if args.format == "exact":
            out.write(export_exact(m))
        else:
            out.write(export_coo(m))
        return EXIT_OK
    if args.format == "exact":
        raise UsageError("observables have float coefficients; use --format coo")
    odd = odd_choice(args, target, phys)
    out.write(export_coo(from_sparse(odd_sparse(odd.alpha, rep))))
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "eigvecs": cmd_eigvecs,
    "probs": cmd_probs,
    "dims": cmd_dims,
    "branch": cmd_branch,
    "verify": cmd_verify,
    "energy": cmd_energy,
    "matrix": cmd_matrix,
}


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    args = build_parser().parse_args(argv)
    try:
        target, phys = resolve(args)
        return COMMANDS[args.verb](args, target, phys, out)
    except (UsageError, NotUnitaryError, DimensionError, chain.CouplingError, ValueError, tomli.TOMLDecodeError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
