import warnings

import pytest

from privlabel import vocab
from privlabel.classify import Hyper, relevant_segments, train
from privlabel.ingest.records import AnnotatedCorpus, parse_annotated_segment
from privlabel.synthetic import cue_embeddings, training_records


@pytest.fixture(scope="session")
def cue_model():
    return cue_embeddings(seed=0)


@pytest.fixture(scope="session")
def cue_corpus():
    return AnnotatedCorpus(tuple(parse_annotated_segment(r) for r in training_records(600, seed=0)))


@pytest.fixture(scope="session")
def cue_stack(cue_model, cue_corpus):
    stack = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for attr in vocab.CLASSIFIER_ATTRIBUTES:
            stack[attr] = train(attr, relevant_segments(cue_corpus, attr), cue_model, Hyper())
    return stack


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
