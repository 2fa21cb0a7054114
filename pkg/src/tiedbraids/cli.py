"""
Command-line front end.

Exit codes: 0 success or equivalent, 1 distinguished, 2 unknown (budget
exhausted), 64 usage error, 65 input format error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import braiding, diagram, equivalence, monoid, rewriting
from .errors import InputError

EX_OK, EX_DIFFERENT, EX_UNKNOWN, EX_USAGE, EX_DATAERR = 0, 1, 2, 64, 65

EPILOG = """\
word files:    first line 'n=<int> flavor=<B|PM|TM|TSM|TPM>', then tokens
               s<i> S<i> p<i> t<i> e<i> and E<i>,<j> (generalized tie)
diagram files: first line 'morse closed' or 'morse braid n=<int>', then one
               event per line: cup i, cap i, x+ i, x- i, p i, tie i j
linking numbers are printed doubled with a /2 suffix, so '+2/2' is +1 and
'+1/2' is one half.
exit codes: 0 ok/equivalent, 1 distinguished, 2 unknown, 64 usage, 65 bad input
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EX_USAGE)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _is_diagram(text: str) -> bool:
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln:
            return ln.startswith("morse")
    return False


def load_word(path: str) -> monoid.MonoidWord:
    return monoid.MonoidWord.from_text(_read(path))


def load_diagram(path: str) -> diagram.MorseDiagram:
    d = diagram.MorseDiagram.parse(_read(path))
    diagram.validate(d)
    return d


def _closure_of(path: str) -> diagram.MorseDiagram:
    """A diagram file as is, or the closure of a word file."""
    text = _read(path)
    if _is_diagram(text):
        d = diagram.MorseDiagram.parse(text)
        diagram.validate(d)
        return d
    w = monoid.MonoidWord.from_text(text)
    if w.flavor is monoid.Flavor.TSM:
        w = monoid.map_flavor_mu(w)
    return diagram.close_braid(w)


# subcommands


def cmd_validate(args, out):
    text = _read(args.file)
    if _is_diagram(text):
        d = diagram.MorseDiagram.parse(text)
        diagram.validate(d)
        print(f"ok diagram {'closed' if d.closed else f'braid n={d.boundary}'} rows={len(d.rows)}", file=out)
    else:
        w = monoid.MonoidWord.from_text(text)
        print(f"ok word n={w.n} flavor={w.flavor.value} length={len(w)}", file=out)
    return EX_OK


def cmd_perm(args, out):
    perm = monoid.permutation_of(load_word(args.word))
    print(str(perm), file=out)
    print("identity" if perm.is_identity() else "cycles " + "".join(
        "(" + " ".join(map(str, c)) + ")" for c in perm.cycles()), file=out)
    return EX_OK


def cmd_normalize(args, out):
    pure, part = monoid.normalize_ties(load_word(args.word))
    out.write(pure.serialize())
    print(f"partition {part}", file=out)
    return EX_OK


def cmd_expand_tie(args, out):
    w = monoid.expand_generalized_tie(args.i, args.j, args.n, args.flavor)
    out.write(w.serialize())
    return EX_OK


def cmd_eq_word(args, out):
    w1, w2 = load_word(args.a), load_word(args.b)
    path = rewriting.words_equal_in_monoid(w1, w2, budget=args.budget)
    if path is None:
        print(f"unknown (budget {args.budget} exhausted)", file=out)
        return EX_UNKNOWN
    print(f"equal in {len(path)} steps", file=out)
    out.write(path.serialize())
    return EX_OK


def cmd_close(args, out):
    w = load_word(args.word)
    if w.flavor is monoid.Flavor.TSM:
        w = monoid.map_flavor_mu(w)
    out.write(diagram.close_braid(w).serialize())
    return EX_OK


def cmd_braid(args, out):
    out.write(braiding.braid_diagram(load_diagram(args.diagram)).serialize())
    return EX_OK


def cmd_fingerprint(args, out):
    fp = diagram.fingerprint(_closure_of(args.file), args.max_precrossings)
    print(fp, file=out)
    return EX_OK


def cmd_eq_closure(args, out):
    w1, w2 = load_word(args.a), load_word(args.b)
    verdict = equivalence.equivalent_closures(
        w1, w2, budget=args.budget, moves=args.moves, mode=args.conj_mode,
        threads=args.threads, max_precrossings=args.max_precrossings)
    if isinstance(verdict, equivalence.Equivalent):
        print(f"equivalent in {len(verdict.certificate)} moves", file=out)
        out.write(verdict.certificate.serialize())
    elif isinstance(verdict, equivalence.Distinguished):
        print("distinguished", file=out)
        for label, fp in (("first", verdict.first), ("second", verdict.second)):
            for line in fp.lines():
                print(f"{label} {line}", file=out)
    else:
        print(f"unknown (budget {verdict.budget} exhausted)", file=out)
    return verdict.exit_code


def cmd_lmove(args, out):
    w = load_word(args.word)
    spec = braiding.LMoveSpec(args.slot, args.strand, args.kind, args.kink)
    out.write(braiding.apply_l_move(w, spec).serialize())
    return EX_OK


def cmd_resolve(args, out):
    d = _closure_of(args.file)
    for res, rd in diagram.enumerate_resolutions(d, args.max_precrossings):
        choice = " ".join(f"{r}:{k}" for r, k in res.choices) or "-"
        vec = " ".join(diagram.format_doubled(v) for v in diagram.linking_vector(rd))
        print(f"{choice} [{vec}]", file=out)
    return EX_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None,
                        help="search budget in visited words (default 100000 for eq-word, 200000 for eq-closure)")
    common.add_argument("--max-precrossings", type=int, default=diagram.DEFAULT_MAX_PRECROSSINGS,
                        help="refuse to resolve more pre-crossings than this")
    common.add_argument("--moves", choices=["markov", "lmove"], default="markov",
                        help="move set for eq-closure")
    common.add_argument("--seed", type=int, default=0,
                        help="accepted for reproducibility; every subcommand is deterministic")
    common.add_argument("--threads", type=int, default=1, help="worker threads for neighbor generation")

    p = _Parser(prog="tiedbraids", description="Tied, pseudo and singular braid words and their closures.",
                epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                            epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check a word or diagram file").add_argument("file")
    add("perm", cmd_perm, "print the strand permutation of a word").add_argument("word")
    add("normalize", cmd_normalize, "split a word into its tie-free part and tie partition").add_argument("word")
    sp = add("expand-tie", cmd_expand_tie, "print the word of a generalized tie")
    sp.add_argument("i", type=int)
    sp.add_argument("j", type=int)
    sp.add_argument("--n", type=int, required=True, help="strand count")
    sp.add_argument("--flavor", default="TM", choices=[f.value for f in monoid.Flavor if f.has_ties])
    sp = add("eq-word", cmd_eq_word, "search for a relation path between two words")
    sp.add_argument("a")
    sp.add_argument("b")
    add("close", cmd_close, "print the closure diagram of a word").add_argument("word")
    add("braid", cmd_braid, "turn a closed diagram into a braid word").add_argument("diagram")
    add("fingerprint", cmd_fingerprint, "closure fingerprint of a word, or fingerprint of a diagram").add_argument("file")
    sp = add("eq-closure", cmd_eq_closure, "decide closure equivalence of two words within a budget")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--conj-mode", choices=list(equivalence.CONJ_MODES), default="theorem",
                    help="which tokens conjugation may cycle: per theorem, or any")
    sp = add("lmove", cmd_lmove, "apply one L-move to a word")
    sp.add_argument("word")
    sp.add_argument("--slot", type=int, required=True, help="gap before this token (0 = top)")
    sp.add_argument("--strand", type=int, required=True)
    sp.add_argument("--kind", choices=["over", "under"], default="over")
    sp.add_argument("--kink", choices=list(braiding.KINKS), default="none")
    add("resolve", cmd_resolve, "list every resolution of the pre-crossings with its linking vector").add_argument("file")
    return p


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.budget is None:
        args.budget = 100_000 if args.command == "eq-word" else equivalence.DEFAULT_BUDGET
    if args.budget <= 0 or args.threads <= 0 or args.max_precrossings < 0:
        print("tiedbraids: error: --budget and --threads must be positive", file=sys.stderr)
        return EX_USAGE
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"tiedbraids: error: {exc}", file=sys.stderr)
        return EX_DATAERR


def main() -> None:
    raise SystemExit(run())
