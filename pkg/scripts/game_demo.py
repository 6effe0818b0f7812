"""Print the stable models of the two-person game and a few brave queries."""

from pathlib import Path

from stablerel import Session, SessionConfig

PROGRAM = Path(__file__).resolve().parent.parent / "programs" / "game.scm"

QUERIES = [
    "(run* (q) (win q))",
    "(run 1 (q) (win 'c) (win 'a))",
    "(run 1 (q) (win 'b) (win 'a))",
    "(run* (q) (fresh (x) (move q x) (noto (win q))))",
]


def main():
    session = Session(SessionConfig(show_models=True))
    session.load(PROGRAM.read_text())
    for text in QUERIES:
        (line,) = session.load(text)
        print(f"{text}\n  => {line}")
    print("stable models of the win cone:")
    for m in dict.fromkeys(session.model_log):
        print(f"  {m}")


if __name__ == "__main__":
    main()
