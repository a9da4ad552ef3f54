"""Deterministic synthetic corpora for tests, fixtures and smoke runs.

Each practice or attribute value is keyed to one cue word. Cue words get
one-hot embedding directions and filler words live in separate dimensions,
so mean embeddings are linearly separable per label.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from privlabel import vocab
from privlabel.embed import EmbeddingModel, save_embeddings
from privlabel.ingest.records import dump_annotated_segment

CUES = {
    (vocab.SEGMENT_PRACTICES, vocab.FP): "collect",
    (vocab.SEGMENT_PRACTICES, vocab.TP): "share",
    (vocab.SEGMENT_PRACTICES, vocab.ISA): "audiences",
    (vocab.SEGMENT_PRACTICES, "DataSecurity"): "encryption",
    (vocab.SEGMENT_PRACTICES, "DataRetention"): "retain",
    (vocab.DOES_DOES_NOT, "Does"): "may",
    (vocab.DOES_DOES_NOT, "DoesNot"): "never",
    (vocab.IDENTIFIABILITY, "Identifiable"): "identifiable",
    (vocab.IDENTIFIABILITY, "Aggregated"): "anonymized",
    (vocab.PURPOSE, "Advertising"): "advertising",
    (vocab.PURPOSE, "AnalyticsResearch"): "analytics",
    (vocab.PURPOSE, "BasicService"): "provide",
    (vocab.PURPOSE, "AdditionalService"): "features",
    (vocab.PURPOSE, "Personalization"): "personalize",
    (vocab.PURPOSE, "LegalRequirement"): "law",
    (vocab.PURPOSE, "ServiceOperationAndSecurity"): "fraud",
    (vocab.PURPOSE, "Merger"): "merger",
    (vocab.PERSONAL_INFO_TYPE, "Contact"): "email",
    (vocab.PERSONAL_INFO_TYPE, "Location"): "location",
    (vocab.PERSONAL_INFO_TYPE, "Financial"): "payment",
    (vocab.PERSONAL_INFO_TYPE, "UserOnlineActivities"): "browsing",
    (vocab.PERSONAL_INFO_TYPE, "CookiesAndTrackingElements"): "cookies",
    (vocab.PERSONAL_INFO_TYPE, "IPAddressAndDeviceIDs"): "device",
    (vocab.PERSONAL_INFO_TYPE, "ComputerInformation"): "crash",
    (vocab.PERSONAL_INFO_TYPE, "Health"): "health",
    (vocab.PERSONAL_INFO_TYPE, "Demographic"): "demographic",
    (vocab.PERSONAL_INFO_TYPE, "SocialMediaData"): "social",
    (vocab.PERSONAL_INFO_TYPE, "UserProfile"): "profile",
    (vocab.AUDIENCE_TYPE, "Children"): "children",
    (vocab.AUDIENCE_TYPE, "Europeans"): "europe",
    (vocab.ACTION_FIRST_PARTY, "CollectInMobileApp"): "app",
    (vocab.ACTION_FIRST_PARTY, "CollectOnWebsite"): "website",
    (vocab.ACTION_THIRD_PARTY, "CollectOnFirstPartyWebsiteApp"): "embedded",
    (vocab.ACTION_THIRD_PARTY, "See"): "view",
}
FILLERS = ("we", "our", "the", "your", "information", "and", "to", "of", "data", "users", "this", "policy")
FILLER_DIMS = 4
CUE_SCALE = 4.0


def values_of(attribute):
    return [v for (a, v) in CUES if a == attribute]


def cue_embeddings(seed: int = 0, extra_tokens=()) -> EmbeddingModel:
    cues = sorted(set(CUES.values()))
    dim = len(cues) + FILLER_DIMS
    rng = np.random.default_rng(seed)
    table = {}
    for i, tok in enumerate(cues):
        v = np.zeros(dim)
        v[i] = CUE_SCALE
        table[tok] = v
    for tok in tuple(FILLERS) + tuple(extra_tokens):
        if tok in table:
            continue
        v = np.zeros(dim)
        v[len(cues):] = rng.normal(0.0, 0.5, FILLER_DIMS)
        table[tok] = v
    return EmbeddingModel(dim, table, {})


def segment_text(practices, attributes, rng=None, n_fillers=3) -> str:
    words = [CUES[(vocab.SEGMENT_PRACTICES, p)] for p in sorted(practices)]
    for attr in sorted(attributes):
        words += [CUES[(attr, v)] for v in sorted(attributes[attr])]
    if rng is None:
        fillers = list(FILLERS[:n_fillers])
    else:
        fillers = list(rng.choice(FILLERS, size=n_fillers))
        rng.shuffle(words)
    tokens = fillers[:1] + words + fillers[1:]
    text = " ".join(tokens)
    return text[0].upper() + text[1:] + "."


def _pick(rng, options, k_max=2):
    k = int(rng.integers(1, k_max + 1))
    return frozenset(rng.choice(options, size=min(k, len(options)), replace=False).tolist())


def random_annotation(rng):
    """A plausible OPP-style (practices, attributes) pair over the cue vocabulary."""
    roll = rng.random()
    if roll < 0.7:
        practices = {vocab.FP} if rng.random() < 0.5 else {vocab.TP}
        if rng.random() < 0.25:
            practices = {vocab.FP, vocab.TP}
        attrs = {
            vocab.DOES_DOES_NOT: frozenset({"DoesNot" if rng.random() < 0.2 else "Does"}),
            vocab.IDENTIFIABILITY: _pick(rng, values_of(vocab.IDENTIFIABILITY), 1),
            vocab.PURPOSE: _pick(rng, values_of(vocab.PURPOSE)),
            vocab.PERSONAL_INFO_TYPE: _pick(rng, values_of(vocab.PERSONAL_INFO_TYPE)),
        }
        if vocab.FP in practices:
            attrs[vocab.ACTION_FIRST_PARTY] = _pick(rng, values_of(vocab.ACTION_FIRST_PARTY))
        if vocab.TP in practices:
            attrs[vocab.ACTION_THIRD_PARTY] = _pick(rng, values_of(vocab.ACTION_THIRD_PARTY))
    elif roll < 0.85:
        practices = {vocab.ISA}
        attrs = {vocab.AUDIENCE_TYPE: _pick(rng, values_of(vocab.AUDIENCE_TYPE), 1)}
    else:
        practices = {"DataSecurity"} if rng.random() < 0.5 else {"DataRetention"}
        attrs = {}
    return frozenset(practices), attrs


def training_records(n: int = 600, seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        practices, attrs = random_annotation(rng)
        text = segment_text(practices, attrs, rng, n_fillers=int(rng.integers(2, 6)))
        out.append({
            "text": text,
            "practices": sorted(practices),
            "attributes": {k: sorted(v) for k, v in sorted(attrs.items())},
        })
    return out


def separable_corpus(n: int = 200, n_labels: int = 4, tokens_per_label: int = 3,
                     dim: int = 32, seed: int = 0):
    """Segments whose labels are keyed to disjoint token sets, plus random embeddings.

    Returns ``(examples, embeddings)`` where examples are ``(tokens, labels)``.
    """
    rng = np.random.default_rng(seed)
    label_names = [f"label{i}" for i in range(n_labels)]
    keyed = {lab: [f"{lab}tok{j}" for j in range(tokens_per_label)] for lab in label_names}
    fillers = [f"filler{j}" for j in range(20)]
    table = {tok: rng.normal(0.0, 1.0, dim) for toks in keyed.values() for tok in toks}
    table.update({tok: rng.normal(0.0, 1.0, dim) for tok in fillers})
    examples = []
    for _ in range(n):
        k = int(rng.integers(1, 3))
        labels = frozenset(rng.choice(label_names, size=k, replace=False).tolist())
        toks = [str(rng.choice(keyed[lab])) for lab in sorted(labels)]
        toks += [str(t) for t in rng.choice(fillers, size=int(rng.integers(1, 4)))]
        rng.shuffle(toks)
        examples.append((tuple(toks), labels))
    return examples, EmbeddingModel(dim, table, {})


# -- five-policy fixture ----------------------------------------------------

FP, TP = vocab.FP, vocab.TP
A = vocab

FIXTURE_POLICIES = {
    "acme": [
        ({FP}, {A.DOES_DOES_NOT: {"Does"}, A.IDENTIFIABILITY: {"Identifiable"}, A.PURPOSE: {"BasicService"},
                A.PERSONAL_INFO_TYPE: {"Contact"}, A.ACTION_FIRST_PARTY: {"CollectInMobileApp"}}),
        ({TP}, {A.DOES_DOES_NOT: {"Does"}, A.IDENTIFIABILITY: {"Identifiable"}, A.PURPOSE: {"Advertising"},
                A.PERSONAL_INFO_TYPE: {"CookiesAndTrackingElements"},
                A.ACTION_THIRD_PARTY: {"CollectOnFirstPartyWebsiteApp"}}),
        ({"DataSecurity"}, {}),
    ],
    "beta": [
        ({FP}, {A.DOES_DOES_NOT: {"Does"}, A.IDENTIFIABILITY: {"Aggregated"}, A.PURPOSE: {"AnalyticsResearch"},
                A.PERSONAL_INFO_TYPE: {"UserOnlineActivities"}, A.ACTION_FIRST_PARTY: {"CollectInMobileApp"}}),
    ],
    "gamma": [
        ({FP}, {A.DOES_DOES_NOT: {"DoesNot"}, A.IDENTIFIABILITY: {"Identifiable"}, A.PURPOSE: {"BasicService"},
                A.PERSONAL_INFO_TYPE: {"Contact"}, A.ACTION_FIRST_PARTY: {"CollectInMobileApp"}}),
        ({"DataRetention"}, {}),
    ],
    "delta": [
        ({FP}, {A.DOES_DOES_NOT: {"Does"}, A.IDENTIFIABILITY: {"Identifiable"}, A.PURPOSE: {"BasicService"},
                A.PERSONAL_INFO_TYPE: {"Location"}, A.ACTION_FIRST_PARTY: {"CollectOnWebsite"}}),
        ({TP}, {A.DOES_DOES_NOT: {"Does"}, A.IDENTIFIABILITY: {"Aggregated"}, A.PURPOSE: {"Advertising"},
                A.PERSONAL_INFO_TYPE: {"IPAddressAndDeviceIDs"}, A.ACTION_THIRD_PARTY: {"See"}}),
    ],
    "eps": [
        ({FP}, {A.DOES_DOES_NOT: {"Does"}, A.IDENTIFIABILITY: {"Identifiable"}, A.PURPOSE: {"Personalization"},
                A.PERSONAL_INFO_TYPE: {"Health"}, A.ACTION_FIRST_PARTY: {"CollectInMobileApp"}}),
        ({FP}, {A.DOES_DOES_NOT: {"Does"}, A.IDENTIFIABILITY: {"Aggregated"}, A.PURPOSE: {"Personalization"},
                A.PERSONAL_INFO_TYPE: {"Health"}, A.ACTION_FIRST_PARTY: {"CollectInMobileApp"}}),
        ({A.ISA}, {A.AUDIENCE_TYPE: {"Children"}}),
    ],
}

# app_id -> (policy_id, price, has_iap, rating, declared privacy types)
FIXTURE_APPS = {
    "app1": ("acme", 0.0, False, "4+", [A.LINKED]),
    "app2": ("acme", 0.0, True, "12+", [A.TRACK, A.LINKED, A.NOT_LINKED]),
    "app3": ("beta", 1.99, False, "4+", [A.NOT_COLLECTED]),
    "app4": ("gamma", 0.0, False, "9+", [A.NOT_COLLECTED]),
    "app5": ("delta", 4.99, True, "17+", [A.LINKED]),
    "app6": ("eps", 0.0, False, "4+", [A.NOT_LINKED]),
}


def _declared_record(app_id, types):
    entries = []
    for t in types:
        if t == A.NOT_COLLECTED:
            entries.append({"type": t})
        elif t == A.TRACK:
            entries.append({"type": t, "categories": ["Identifiers"]})
        else:
            entries.append({"type": t, "purposes": [{"purpose": "Analytics", "categories": ["UsageData"]}]})
    return {"app_id": app_id, "privacy_types": entries}


def fixture_html(policy_id: str) -> str:
    paras = []
    for i, (practices, attrs) in enumerate(FIXTURE_POLICIES[policy_id]):
        paras.append(f"<p>{segment_text(practices, attrs)}</p>")
    body = "\n".join(paras)
    return (
        "<!DOCTYPE html>\n<html><head><title>Privacy Policy</title>"
        "<script>track();</script><style>p { color: black; }</style></head>\n"
        f"<body><nav>Home | About | Contact</nav>\n<main>\n{body}\n</main>\n"
        "<footer>Copyright</footer></body></html>\n"
    )


def write_fixture_corpus(root, seed: int = 0, n_training: int = 600) -> dict:
    """Write a complete corpus directory; returns the paths written."""
    root = Path(root)
    (root / "policies").mkdir(parents=True, exist_ok=True)
    (root / "templates").mkdir(exist_ok=True)
    for pid in FIXTURE_POLICIES:
        (root / "policies" / f"{pid}.html").write_text(fixture_html(pid), encoding="utf-8")

    labels = [_declared_record(a, spec[4]) for a, spec in FIXTURE_APPS.items()]
    (root / "labels.json").write_text(json.dumps(labels, indent=1) + "\n", encoding="utf-8")
    with open(root / "metadata.jsonl", "w", encoding="utf-8") as fh:
        for app_id, (pid, price, iap, rating, _) in FIXTURE_APPS.items():
            fh.write(json.dumps({
                "app_id": app_id, "price": price, "has_iap": iap, "content_rating": rating,
                "policy_url": f"https://example.com/privacy/{pid}.html", "seller": f"{pid} inc",
            }) + "\n")

    with open(root / "training.jsonl", "w", encoding="utf-8") as fh:
        for rec in training_records(n_training, seed):
            fh.write(json.dumps(rec) + "\n")

    save_embeddings(cue_embeddings(seed), root / "embeddings.vec")

    acme = [segment_text(p, a) for p, a in FIXTURE_POLICIES["acme"]]
    (root / "templates" / "AcmeGenerator.txt").write_text("\n\n".join(acme) + "\n", encoding="utf-8")
    other = [segment_text({vocab.ISA}, {A.AUDIENCE_TYPE: {"Europeans"}}),
             segment_text({"DataRetention"}, {})]
    (root / "templates" / "RetentionKit.txt").write_text("\n\n".join(other) + "\n", encoding="utf-8")
    return {
        "policies": root / "policies",
        "labels": root / "labels.json",
        "metadata": root / "metadata.jsonl",
        "training": root / "training.jsonl",
        "embeddings": root / "embeddings.vec",
        "templates": root / "templates",
    }


def dump_corpus(corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seg in corpus.segments:
            fh.write(json.dumps(dump_annotated_segment(seg)) + "\n")
