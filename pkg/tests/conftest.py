import pathlib

import pytest

from polyc import check_program, desugar, parse_source

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def corpus_source(name):
    return (CORPUS / name).read_text(encoding="utf-8")


def load(name):
    """Parse, desugar and mode-detect a corpus program."""
    from polyc.parser import detect_mode

    src = corpus_source(name)
    mode = detect_mode(src)
    return desugar(parse_source(src, mode)), mode


def load_checked(name):
    prog, mode = load(name)
    res = check_program(prog, mode)
    assert res.ok, [d.render(name) for d in res.errors]
    return prog, mode


def compile_src(src, mode="core"):
    return desugar(parse_source(src, mode))


@pytest.fixture
def fastmul():
    return load_checked("fastmul.pc")[0]
