"""Command-line entry point: ``embedcert {gen,smachine,derive,verify,measure,oracle} ...``.

Exit codes: 0 success, 1 parse or validation error, 2 verification failure, 3 oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from . import embed_bs as bs
from . import embed_hvm as hvm
from . import smachine as sm
from . import verbal
from .fitting import FitReport, fit_rows, rows_to_csv
from .presentations import (TraceError, dump_json, load_json, presentation_from_json, presentation_to_json,
                            trace_from_json, trace_to_json, verify_trace)
from .words import Alphabet, LawError, WordError, free_reduce, parse_law

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_DISAGREE = 0, 1, 2, 3
NONSTANDARD = "nonstandard-N"
FAMILIES = ("sigma_s", "wn", "bs-random-trivial", "sigma_hvm", "law-instance", "verbal-dehn")


class CliError(Exception):
    def __init__(self, msg, code=EXIT_INPUT):
        super().__init__(msg)
        self.code = code


# -- output helpers -----------------------------------------------------------

def _emit(args, text: str, payload: dict | None = None):
    if args.json and payload is not None:
        if args.allow_small_N:
            payload = dict(payload, note=NONSTANDARD)
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)
        if args.allow_small_N:
            print(NONSTANDARD)


def _write_json(args, obj: dict):
    if args.allow_small_N:
        obj = dict(obj, note=NONSTANDARD)
    if args.out:
        dump_json(obj, args.out)


def _write_text(path, text: str):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _law(text):
    return parse_law(text)


def _hvm(args):
    return hvm.HvmParams(_law(args.law), args.m, args.N, args.allow_small_N)


def _bs(args):
    return bs.BsParams(args.k, args.N, args.allow_small_N)


def _word_list(alpha: Alphabet, text: str):
    """``"a1 a2; a1^-1"`` -> tuple of words, one per ``;``-separated field."""
    return tuple(free_reduce(alpha.parse(part)) for part in text.split(";"))


def _checked(trace):
    """Self-verify a trace before anything is written."""
    try:
        return verify_trace(trace)
    except TraceError as exc:
        raise CliError(f"self-verification failed: {exc}", EXIT_VERIFY) from exc


def _generic_alphabet(text: str) -> Alphabet:
    names = sorted({tok.partition("^")[0] for tok in text.split()})
    return Alphabet(names or ["a"])


# -- gen ------------------------------------------------------------------------

def cmd_gen(args):
    if args.family == "hvm":
        p = _hvm(args)
        pres = hvm.gen_H(p) if args.group == "H" else hvm.gen_G(p)
        counts = hvm.count_schema(p)
    else:
        p = _bs(args)
        pres = bs.gen_H_bs(p) if args.group == "H" else bs.gen_G_bs(p)
        counts = bs.count_schema(p)
    _write_json(args, presentation_to_json(pres))
    ngen, nrel = len(pres.alphabet), len(pres.relators)
    lines = [f"{ngen} generators, {nrel} relators"]
    for tag, c in counts[args.group]["relatorsByTag"].items():
        lines.append(f"  {tag}: {c}")
    _emit(args, "\n".join(lines), {"generators": ngen, "relators": nrel, "counts": counts})


# -- smachine -------------------------------------------------------------------

def cmd_smachine(args):
    v = _law(args.law)
    machine = sm.build_machine_for_law(v, args.m)
    if args.action == "build":
        data = sm.machine_to_json(machine)
        _write_json(args, data)
        _emit(args, json.dumps(data, indent=1), data)
        return EXIT_OK
    if args.action == "main-property":
        rep = sm.main_property_check(v, args.m, args.len)
        text = (f"no mismatches, {rep.checked} words checked, {rep.accepted} accepted" if rep.ok
                else f"{len(rep.mismatches)} mismatches, {rep.checked} words checked")
        _emit(args, text, {"checked": rep.checked, "accepted": rep.accepted,
                           "mismatches": list(rep.mismatches)})
        return EXIT_OK if rep.ok else EXIT_VERIFY
    w = machine.parse_word(args.word)
    if args.action == "run":
        rules = {r.name: r for r in machine.symmetric_rules()}
        lines = [machine.format(w)]
        for name in filter(None, (args.rules or "").split(",")):
            if name not in rules:
                raise CliError(f"unknown rule {name!r}")
            nw = sm.apply_rule(machine, w, rules[name])
            if nw is None:
                raise CliError(f"rule {name} is not applicable to {machine.format(w)}")
            w = nw
            lines.append(f"{name}: {machine.format(w)}")
        _emit(args, "\n".join(lines), {"words": lines})
        return EXIT_OK
    res = sm.accepts(machine, w, args.max_tape, args.max_steps)
    if res.accepted:
        comp = res.computation
        lines = ["accepted"] + [machine.format(comp.words[0])]
        lines += [f"{name}: {machine.format(z)}" for name, z in zip(comp.rules, comp.words[1:])]
        lines.append(f"area {comp.area}")
    else:
        lines = [f"not accepted ({res.status} search, {res.explored} words explored)"]
    _emit(args, "\n".join(lines), {"accepted": res.accepted, "status": res.status, "explored": res.explored,
                                   "rules": list(res.computation.rules) if res.accepted else None})
    return EXIT_OK


# -- derive -----------------------------------------------------------------------

def cmd_derive(args):
    if args.what in ("sigma", "law-instance"):
        p = _hvm(args)
        if args.what == "sigma":
            X = _word_list(p.alphabet_G, args.X)
            trace = hvm.derive_sigma_trivial(p, X)
        else:
            Y = _word_list(p.alphabet_H, args.Y)
            trace = hvm.derive_law_instance(p, Y)
    else:
        p = _bs(args)
        if args.what == "wn":
            trace = bs.derive_wn(p, args.n)
        else:
            w = free_reduce(p.bs_word(args.word))
            if bs.oracle_affine(p, w) != "trivial":
                raise CliError("word is not trivial in the Baumslag-Solitar group")
            trace = bs.derive_bs_trivial(p, w)
    rep = _checked(trace)
    _write_json(args, trace_to_json(trace))
    alpha = trace.presentation.alphabet
    text = f"area {rep.area}, steps {rep.stepCount}, maxIntermediateLength {rep.maxIntermediateLength}"
    if args.show_word:
        text = alpha.format(trace.start) + "\n" + text
    _emit(args, text, {"area": rep.area, "steps": rep.stepCount,
                       "maxIntermediateLength": rep.maxIntermediateLength, "start": alpha.format(trace.start)})
    return EXIT_OK


# -- verify -------------------------------------------------------------------------

def cmd_verify(args):
    try:
        data = load_json(args.trace)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read trace: {exc}") from exc
    pres = presentation_from_json(load_json(args.presentation)) if args.presentation else None
    try:
        trace = trace_from_json(data, pres)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"malformed trace: {exc}") from exc
    try:
        rep = verify_trace(trace)
    except TraceError as exc:
        raise CliError(f"verification failed: {exc}", EXIT_VERIFY) from exc
    _emit(args, f"ok: area {rep.area}, steps {rep.stepCount}, maxIntermediateLength {rep.maxIntermediateLength}",
          {"ok": True, "area": rep.area, "steps": rep.stepCount,
           "maxIntermediateLength": rep.maxIntermediateLength})
    return EXIT_OK


# -- measure ------------------------------------------------------------------------

def _random_reduced(rng, ngens, length):
    out = []
    while len(out) < length:
        x = rng.choice([g for i in range(1, ngens + 1) for g in (i, -i)])
        if not out or out[-1] != -x:
            out.append(x)
    return tuple(out)


def random_values(rng, k, m, total):
    """k random reduced words over 1..m whose lengths sum to ``total``."""
    cuts = sorted(rng.randint(0, total) for _ in range(k - 1))
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    return tuple(_random_reduced(rng, m, s) for s in sizes)


def _instance(args, family, n, rng):
    if family in ("sigma_s", "wn", "bs-random-trivial"):
        p = _bs(args)
        if family == "sigma_s":
            return p.k, p.N, n, bs.derive_sigma_s(p, n)
        if family == "wn":
            return p.k, p.N, n, bs.derive_wn(p, n)
        w = bs.random_trivial_word(p, n, rng)
        return p.k, p.N, len(w), bs.derive_bs_trivial(p, w)
    p = _hvm(args)
    X = random_values(rng, p.k, p.m, n)
    if family == "sigma_hvm":
        return p.k, p.N, n, hvm.derive_sigma_trivial(p, X)
    return p.k, p.N, n, hvm.derive_law_instance(p, tuple(p.a_to_b(x) for x in X))


def measure_rows(args) -> list:
    rows = []
    family = args.family + ("+" + NONSTANDARD if args.allow_small_N else "")
    for n in range(args.nmin, args.nmax + 1, args.step):
        for i in range(args.count):
            rng = random.Random(f"{args.seed}:{args.family}:{n}:{i}")
            t0 = time.perf_counter()
            k, N, size, trace = _instance(args, args.family, n, rng)
            rep = _checked(trace)
            ms = (time.perf_counter() - t0) * 1000.0
            rows.append({"family": family, "k": k, "N": N, "n": size, "wordLength": len(trace.start),
                         "area": rep.area, "maxIntermediateLength": rep.maxIntermediateLength,
                         "wallMillis": round(ms, 3) if args.wall_millis else None})
    rows.sort(key=lambda r: r["n"])
    return rows


def _verbal_csv(args) -> str:
    law = _law(args.law)
    lines = ["law,n,fhat,exact,witnessCount,wallMillis"]
    t0 = time.perf_counter()
    table = verbal.verbal_dehn_estimate(law, args.nmax, args.ngens, args.cost_bound, args.conj_bound)
    ms = f"{(time.perf_counter() - t0) * 1000.0:.3f}" if args.wall_millis else ""
    for r in table.rows:
        if r.n >= args.nmin:
            lines.append(f'"{law}",{r.n},{r.fhat},{str(r.exact).lower()},{r.witnessCount},{ms}')
    return "\n".join(lines) + "\n"


def cmd_measure(args):
    if args.family == "verbal-dehn":
        text = _verbal_csv(args)
        if args.out:
            _write_text(args.out, text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    rows = measure_rows(args)
    text = rows_to_csv(rows)
    lo = args.fit_lo if args.fit_lo is not None else args.nmax / 8
    try:
        fit = fit_rows(rows, rows[0]["family"], (lo, args.nmax)) if rows else None
    except ValueError:
        fit = None
    summary = _fit_text(fit)
    if args.out:
        _write_text(args.out, text)
        _emit(args, summary, _fit_json(fit))
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


def _fit_text(fit: FitReport | None) -> str:
    if fit is None:
        return "fit: not enough points"
    return (f"fit {fit.family}: slope {fit.slope:.4f}, intercept {fit.intercept:.4f}, r2 {fit.r2:.4f}, "
            f"points {fit.points}, window [{fit.window[0]}, {fit.window[1]}]")


def _fit_json(fit):
    if fit is None:
        return {"fit": None}
    return {"fit": {"family": fit.family, "slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2,
                    "points": fit.points, "window": list(fit.window)}}


# -- oracle ------------------------------------------------------------------------------

def cmd_oracle(args):
    if args.which == "verbal-search":
        law = _law(args.law)
        alpha = _generic_alphabet(args.word)
        w = free_reduce(alpha.parse(args.word))
        if verbal.membership_precheck(law, w) == "out":
            _emit(args, "not in the verbal subgroup (exponent sums)", {"member": False})
            return EXIT_OK
        wit = verbal.witness_search(law, w, args.cost_bound, args.conj_bound)
        if wit is None:
            _emit(args, "no witness within bounds", {"member": None})
            return EXIT_OK
        ok, cost = verbal.witness_verify(w, wit)
        if not ok:
            raise CliError("witness failed verification", EXIT_VERIFY)
        data = verbal.witness_to_json(wit, alpha)
        _write_json(args, data)
        _emit(args, f"cost {cost}, factors {wit.factorCount}", {"member": True, "cost": cost, "witness": data})
        return EXIT_OK
    p = _bs(args)
    w = free_reduce(p.bs_word(args.word))
    if any(abs(x) not in (p.b1, p.b2) for x in w):
        raise CliError("word must use only b1 and b2")
    affine = bs.oracle_affine(p, w)
    britton = bs.oracle_britton(p, w).verdict
    if args.which == "bs-affine":
        _emit(args, affine, {"affine": affine})
    elif args.which == "bs-britton":
        _emit(args, britton, {"britton": britton})
    else:
        _emit(args, f"{affine}/{britton}", {"affine": affine, "britton": britton, "agree": affine == britton})
        if affine != britton:
            return EXIT_DISAGREE
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------

def _common():
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--seed", type=int, default=0, help="seed for every randomized input")
    c.add_argument("--out", help="output file (JSON or CSV)")
    c.add_argument("--json", action="store_true", help="print a JSON summary instead of text")
    c.add_argument("--N", type=int, default=sm.MIN_N, help="number of hub sectors (default 29)")
    c.add_argument("--allow-small-N", dest="allow_small_N", action="store_true",
                   help="permit N below 29; outputs are marked nonstandard-N")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="embedcert", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def law_args(p, law="x1^3", m=1):
        p.add_argument("--law", default=law)
        p.add_argument("--m", type=int, default=m)

    g = sub.add_parser("gen", help="write a presentation").add_subparsers(dest="family", required=True)
    p = g.add_parser("hvm", parents=[common])
    law_args(p)
    p.add_argument("--group", choices=("G", "H"), default="H")
    p = g.add_parser("bs", parents=[common])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--group", choices=("G", "H"), default="H")

    s = sub.add_parser("smachine", help="machine of a law").add_subparsers(dest="action", required=True)
    p = s.add_parser("build", parents=[common])
    law_args(p)
    p = s.add_parser("run", parents=[common])
    law_args(p)
    p.add_argument("--word", required=True)
    p.add_argument("--rules", default="", help="comma-separated rule names, inverse rules end in ^inv")
    p = s.add_parser("accepts", parents=[common])
    law_args(p)
    p.add_argument("--word", required=True)
    p.add_argument("--max-tape", dest="max_tape", type=int, default=12)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=10**6)
    p = s.add_parser("main-property", parents=[common])
    law_args(p)
    p.add_argument("--len", type=int, required=True)

    d = sub.add_parser("derive", help="derive and self-verify a trace").add_subparsers(dest="what", required=True)
    p = d.add_parser("sigma", parents=[common])
    law_args(p)
    p.add_argument("--X", required=True, help="values for x1..xk, separated by ';'")
    p = d.add_parser("law-instance", parents=[common])
    law_args(p)
    p.add_argument("--Y", required=True, help="b-word values for x1..xk, separated by ';'")
    p = d.add_parser("wn", parents=[common])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, required=True)
    p = d.add_parser("bs-word", parents=[common])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--word", required=True)
    for name in ("sigma", "law-instance", "wn", "bs-word"):
        d.choices[name].add_argument("--show-word", dest="show_word", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="replay a trace file")
    p.add_argument("trace")
    p.add_argument("--presentation", help="presentation file for traces without an inline one")

    p = sub.add_parser("measure", parents=[common], help="sweep a family and write CSV")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--nmin", type=int, default=1)
    p.add_argument("--nmax", type=int, default=16)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--count", type=int, default=1, help="instances per n")
    p.add_argument("--k", type=int, default=2)
    law_args(p)
    p.add_argument("--ngens", type=int, default=2)
    p.add_argument("--cost-bound", dest="cost_bound", type=int, default=8)
    p.add_argument("--conj-bound", dest="conj_bound", type=int, default=3)
    p.add_argument("--fit-lo", dest="fit_lo", type=float, default=None, help="lower end of fit window")
    p.add_argument("--wall-millis", dest="wall_millis", action="store_true",
                   help="fill the wallMillis column (makes output nondeterministic)")

    o = sub.add_parser("oracle", help="word problem oracles").add_subparsers(dest="which", required=True)
    for name in ("bs-affine", "bs-britton", "bs-both"):
        p = o.add_parser(name, parents=[common])
        p.add_argument("--k", type=int, default=2)
        p.add_argument("--word", required=True)
    p = o.add_parser("verbal-search", parents=[common])
    p.add_argument("--law", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--cost-bound", dest="cost_bound", type=int, default=8)
    p.add_argument("--conj-bound", dest="conj_bound", type=int, default=3)
    return ap


COMMANDS = {"gen": cmd_gen, "smachine": cmd_smachine, "derive": cmd_derive, "verify": cmd_verify,
            "measure": cmd_measure, "oracle": cmd_oracle}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        code = COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except TraceError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, LawError, WordError, KeyError, sm.MachineError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
