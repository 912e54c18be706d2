import json
import math
import os
import pathlib
import re
from urllib.parse import parse_qsl, urlencode, urlsplit

import pytest

import serank

DATA_DIR = pathlib.Path(os.environ.get("SERANK_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))

TRACKING = re.compile(r"^(utm_.*|gclid|fbclid|ref|nav)$", re.IGNORECASE)
EXTENSIONS = (".aspx", ".asp", ".php", ".html", ".htm", ".jsp", ".shtml")


def reference_canonical(url):
    """Plain urllib version of the default policy, for well-formed URLs only."""
    parts = urlsplit(url)
    scheme = parts.scheme.lower()
    if scheme == "http":
        scheme = "https"
    host = parts.hostname.rstrip(".")
    while host.startswith("www.") and "." in host[4:]:
        host = host[4:]
    port = parts.port
    if port in (80, 443):
        port = None
    path = parts.path.lower()
    while len(path) > 1 and path.endswith("/"):
        path = path[:-1]
    changed = True
    while changed:
        changed = False
        for ext in EXTENSIONS:
            if path.endswith(ext) and path[: -len(ext)] not in ("", "/"):
                path = path[: -len(ext)]
                changed = True
    if not path:
        path = "/"
    query = sorted((k, v) for k, v in parse_qsl(parts.query, keep_blank_values=True) if not TRACKING.match(k))
    out = f"{scheme}://{host}" + (f":{port}" if port else "") + path
    if query:
        out += "?" + urlencode(query)
    return out


SAMPLE_URLS = [
    "http://www.maps.com/FunFacts.aspx?nav=FF",
    "HTTP://Example.ORG:80/a/?b=2&a=1#frag",
    "https://news.example.com:8443/World/Index.html",
    "http://www.shop.example/cart/?utm_source=x&item=42&gclid=9",
    "https://example.org",
    "https://a.example/x/y/z/",
    "http://www.www.example.com/page.php?q=1&b=2",
]


@pytest.mark.parametrize("url", SAMPLE_URLS)
def test_canonical_url_matches_reference(url):
    assert serank.canonical_url(url) == reference_canonical(url)


def test_canonical_url_is_idempotent_and_merges_variants():
    variants = [
        "http://www.maps.com/FunFacts.aspx",
        "http://www.maps.com/funfacts.aspx",
        "http://www.maps.com/FunFacts.aspx?nav=FF",
        "http://www.maps.com/FunFacts",
    ]
    canon = {serank.canonical_url(v) for v in variants}
    assert canon == {"https://maps.com/funfacts"}
    for url in SAMPLE_URLS:
        once = serank.canonical_url(url)
        assert serank.canonical_url(once) == once
    with pytest.raises(serank.MalformedUrl):
        serank.canonical_url("no scheme here")


def test_policy_switches():
    policy = serank.CanonicalizationPolicy()
    policy.strip_page_extensions = False
    assert serank.canonical_url("http://www.maps.com/FunFacts.aspx", policy) == "https://maps.com/funfacts.aspx"


def test_scores_against_hand_computation():
    q = serank.default_ctr()
    assert sum(x * x for x in q) == pytest.approx(0.172842, abs=1e-15)
    pages = [f"https://p.example/{i}" for i in range(10)]
    corpus = serank.build_corpus([("a", "k", pages), ("b", "k", pages[:3])])
    r = serank.page_scores(corpus, "k")
    assert r["https://p.example/0"] == pytest.approx((q[0] + q[0]) / 2)
    assert r["https://p.example/5"] == pytest.approx(q[5] / 2)
    expected_a = sum(q[p] * r[pages[p]] for p in range(10))
    assert serank.engine_score(corpus, "a", "k") == pytest.approx(expected_a, abs=1e-15)
    table = serank.compute_scores(corpus)
    assert table.consensus_scores[0] >= max(row[0] for row in table.engine_scores)
    assert table.consensus[0][:3] == pages[:3]


def test_paired_t_test_against_direct_formula():
    d = [0.1, 0.2, 0.15, 0.05, 0.1]
    mean = sum(d) / len(d)
    sd = math.sqrt(sum((x - mean) ** 2 for x in d) / (len(d) - 1))
    result = serank.paired_t_test(d, [0.0] * len(d))
    assert result["t"] == pytest.approx(mean / (sd / math.sqrt(len(d))), rel=1e-12)
    assert result["dof"] == 4
    scipy_stats = pytest.importorskip("scipy.stats")
    assert result["p"] == pytest.approx(2 * scipy_stats.t.sf(result["t"], 4), rel=1e-9)
    same = serank.paired_t_test(d, d)
    assert same["p"] == 1.0


def test_extreme_queries_and_overlap():
    values = [("k1", 0.9), ("k3", 0.7), ("k2", 0.5)]
    assert [k for k, _ in serank.extreme_queries(values, 2, "highest")] == ["k1", "k3"]
    assert [k for k, _ in serank.extreme_queries(values, 2, "lowest")] == ["k2", "k3"]
    corpus = serank.build_corpus([("a", "k", ["https://x/1", "https://x/2"]), ("b", "k", ["https://x/1", "https://x/2"])])
    assert serank.overlap_curve(corpus, "a") == [100.0] * 10


def test_run_pipeline_on_fixture(tmp_path):
    config = json.loads((DATA_DIR / "fixture" / "run.json").read_text())
    config["corpus"] = str(DATA_DIR / "fixture" / "corpus.jsonl")
    config["out_dir"] = str(tmp_path / "report")
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps(config))
    files = serank.run_pipeline(str(config_path))
    names = {pathlib.Path(f).name for f in files}
    assert {"scores.csv", "pvalues.csv", "run_manifest.json"} <= names
    rows = (tmp_path / "report" / "scores.csv").read_text().splitlines()
    means = {line.split(",")[0]: float(line.split(",")[1]) for line in rows[1:]}
    consensus = means.pop("consensus")
    assert all(0.0 <= m < consensus for m in means.values())


def test_synthetic_records_are_deterministic():
    assert serank.synthetic_records(3) == serank.synthetic_records(3)
    assert serank.synthetic_records(3) != serank.synthetic_records(4)
