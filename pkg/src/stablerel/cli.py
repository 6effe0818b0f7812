"""Command line entry point: ``stablerel run|repl|classify|graph|ground|bench``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import SessionConfig
from .errors import ParseError, StableRelError
from .sexpr import balanced, parse
from .session import Session, bench, report

EXIT_OK, EXIT_DIAG, EXIT_PARSE = 0, 1, 2


def _engine_flags(p):
    p.add_argument("--mode", choices=["run", "run-partial"], help="force every run form to this interface")
    p.add_argument("--legacy-coarse", action="store_true", help="register every definition (pre-fix behaviour)")
    p.add_argument("--auto", action="store_true", help="skip the global check for definite/stratified programs")
    p.add_argument("--oracle", action="store_true", help="use plain 2^N stable-model enumeration")
    p.add_argument("--cap", type=int, default=SessionConfig.cap, help="max atoms enumerated at once")
    p.add_argument("--steps", type=int, default=None, help="search step budget")
    p.add_argument("--occurs-check", action="store_true")
    p.add_argument("--show-models", action="store_true", help="print stable models to stderr")


def _config(args) -> SessionConfig:
    return SessionConfig(
        legacy_coarse=args.legacy_coarse,
        auto=args.auto,
        oracle=args.oracle,
        cap=args.cap,
        steps=args.steps,
        occurs_check=args.occurs_check,
        mode=args.mode,
        show_models=args.show_models,
    )


def _read(path):
    return Path(path).read_text(encoding="utf-8")


def _load(path, cfg, out):
    session = Session(cfg)
    for line in session.load(_read(path)):
        out.write(line + "\n")
    return session


def cmd_run(args, out, err):
    cfg = _config(args)
    session = Session(cfg)
    for form in parse(_read(args.file)):
        line = session.execute_form(form)
        for m in session.model_log:
            err.write(m + "\n")
        session.model_log.clear()
        if line is not None:
            out.write(line + "\n")
    return EXIT_OK


def cmd_classify(args, out, err):
    session = _load(args.file, _config(args), out)
    out.write(report(session.program, "classify"))
    return EXIT_OK


def cmd_graph(args, out, err):
    session = _load(args.file, _config(args), out)
    text = report(session.program, "graph-dot")
    if args.dot:
        Path(args.dot).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def cmd_ground(args, out, err):
    session = _load(args.file, _config(args), out)
    out.write(report(session.program, "ground-dump"))
    return EXIT_OK


def cmd_bench(args, out, err):
    session = _load(args.file, _config(args), out)
    forms = parse(args.query)
    if len(forms) != 1:
        raise ParseError("--query must hold exactly one run form")
    rep = bench(session, forms[0], args.repetitions)
    out.write(rep.format())
    return EXIT_DIAG if rep.semantic_failure else EXIT_OK


def cmd_repl(args, out, err, stdin=None):
    stdin = stdin or sys.stdin
    session = Session(_config(args), allow_redefine=True)
    interactive = stdin.isatty()
    buf = ""
    while True:
        if interactive:
            out.write("> " if not buf else ". ")
            out.flush()
        line = stdin.readline()
        if not line:
            break
        buf += line
        if not balanced(buf):
            continue
        text, buf = buf, ""
        try:
            for result in session.load(text):
                out.write(result + "\n")
        except StableRelError as e:
            err.write(f"error: {e}\n")
        for m in session.model_log:
            err.write(m + "\n")
        session.model_log.clear()
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="stablerel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a program file")
    p.add_argument("file")
    _engine_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("repl", help="interactive session")
    _engine_flags(p)
    p.set_defaults(func=cmd_repl)

    p = sub.add_parser("classify", help="definite / stratified / normal report")
    p.add_argument("file")
    _engine_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("graph", help="dependency graph in DOT")
    p.add_argument("file")
    p.add_argument("--dot", help="write DOT here instead of stdout")
    _engine_flags(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("ground", help="dump the ground program of the registered rules")
    p.add_argument("file")
    _engine_flags(p)
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("bench", help="time a query under run and run-partial")
    p.add_argument("file")
    p.add_argument("--query", required=True, help="a run form, e.g. '(run* (q) (p q))'")
    p.add_argument("-r", "--repetitions", type=int, default=3)
    _engine_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    logging.basicConfig(format="warning: %(message)s", level=logging.WARNING, stream=err)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out, err)
    except ParseError as e:
        err.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except StableRelError as e:
        err.write(f"error: {e}\n")
        return EXIT_DIAG
    except OSError as e:
        err.write(f"error: {e}\n")
        return EXIT_DIAG


if __name__ == "__main__":
    sys.exit(main())
