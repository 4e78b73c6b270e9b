import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxhs.corpus import (
    anonymize,
    filter_covid_articles,
    fold,
    keep_first_level_replies,
    load_covid_keywords,
    load_lexicon,
    mark_slur_comments,
    run_ingest,
    run_sampling,
    sample_comments_for_annotation,
    select_articles,
)
from ctxhs.types import Article, ConfigurationError, LexiconEntry, SamplingConfig, SeedLexicon

from conftest import make_comment
from oracles import anonymize_oracle, covid_match_oracle, slur_scan_oracle


def art(article_id, body, outlet="@diario", tweet="titular"):
    return Article(article_id=article_id, outlet=outlet, tweet_text=tweet, body=body)


# ---------------------------------------------------------------------------
# COVID keyword filter
# ---------------------------------------------------------------------------


class TestCovidFilter:
    def test_keyword_in_body_retained(self):
        articles = [art("a", "…la cuarentena sigue…")]
        assert list(filter_covid_articles(articles, ["cuarentena"])) == articles

    def test_empty_body_dropped(self):
        assert list(filter_covid_articles([art("a", "")], ["cuarentena"])) == []

    def test_prefix_rule_hits_plural(self):
        articles = [art("a", "síntomas leves")]
        assert list(filter_covid_articles(articles, ["síntoma"])) == articles

    def test_accent_insensitive_both_ways(self):
        assert list(filter_covid_articles([art("a", "sintomas leves")], ["síntoma"]))
        assert list(filter_covid_articles([art("a", "síntomas leves")], ["sintoma"]))

    def test_case_insensitive(self):
        assert list(filter_covid_articles([art("a", "El COVID-19 avanza")], ["covid"]))

    def test_word_boundary_required(self):
        # "encierro" inside another word must not match
        assert not list(filter_covid_articles([art("a", "desencierro total")], ["encierro"]))

    def test_empty_keywords_is_config_error(self):
        with pytest.raises(ConfigurationError):
            list(filter_covid_articles([art("a", "x")], []))

    def test_matches_bruteforce_oracle_on_random_corpus(self):
        import random

        rng = random.Random(20200301)
        keywords = load_covid_keywords()
        filler = ["la", "gente", "hoy", "anuncio", "medidas", "síntomas", "fase",
                  "cuarentenas", "encierros", "desencierro", "vacuna", "Wuhan,",
                  "normalidades", "infectados", "FIEBRE", "fiebres", "sintomático"]
        bodies = [
            " ".join(rng.choices(filler + keywords, k=rng.randint(1, 12)))
            for _ in range(400)
        ]
        articles = [art(str(i), body) for i, body in enumerate(bodies)]
        kept = {a.article_id for a in filter_covid_articles(articles, keywords)}
        expected = {
            a.article_id for a in articles if covid_match_oracle(a.body, keywords)
        }
        assert kept == expected


# ---------------------------------------------------------------------------
# Reply depth
# ---------------------------------------------------------------------------


class TestFirstLevel:
    def test_drops_deeper_replies(self):
        cs = [
            make_comment("c1", reply_depth=1),
            make_comment("c2", reply_depth=2),
            make_comment("c3", reply_depth=1),
        ]
        assert [c.comment_id for c in keep_first_level_replies(cs)] == ["c1", "c3"]

    def test_empty(self):
        assert list(keep_first_level_replies([])) == []

    def test_all_deep(self):
        cs = [make_comment("c1", reply_depth=2), make_comment("c2", reply_depth=3)]
        assert list(keep_first_level_replies(cs)) == []


# ---------------------------------------------------------------------------
# Slur marking
# ---------------------------------------------------------------------------


NEGRA_ENTRY = LexiconEntry(
    expression="negr",
    match_mode="inflected",
    exclusion_terms=["plata", "guita"],
    required_prepositions=["de", "del"],
)


class TestSlurMarking:
    def test_inflected_with_preposition(self):
        lexicon = SeedLexicon([NEGRA_ENTRY])
        comments = [make_comment("c", text="negra de mierda")]
        assert mark_slur_comments(comments, lexicon) == [True]

    def test_exclusion_word_blocks_match(self):
        lexicon = SeedLexicon([NEGRA_ENTRY])
        comments = [make_comment("c", text="negra de mierda me debe plata")]
        assert mark_slur_comments(comments, lexicon) == [False]

    def test_no_entry_present(self):
        lexicon = SeedLexicon([NEGRA_ENTRY])
        comments = [make_comment("c", text="buen día a todos")]
        assert mark_slur_comments(comments, lexicon) == [False]

    def test_missing_preposition_blocks_match(self):
        lexicon = SeedLexicon([NEGRA_ENTRY])
        comments = [make_comment("c", text="la negra del barrio"),
                    make_comment("c2", text="me gusta el negro")]
        assert mark_slur_comments(comments, lexicon) == [True, False]

    def test_literal_multiword(self):
        entry = LexiconEntry(expression="uno menos", match_mode="literal")
        lexicon = SeedLexicon([entry])
        flags = mark_slur_comments(
            [
                make_comment("c1", text="UNO MENOS, bien ahí"),
                make_comment("c2", text="uno más o menos da igual"),
            ],
            lexicon,
        )
        assert flags == [True, False]

    def test_vendored_lexicon_loads_folded(self):
        lexicon = load_lexicon()
        assert len(lexicon.entries) > 20
        for entry in lexicon.entries:
            assert entry.expression == fold(entry.expression)

    def test_fuzz_corpus_matches_scan_oracle(self):
        import random

        rng = random.Random(7)
        lexicon = load_lexicon()
        vocab = [
            "la", "negra", "negro", "negros", "de", "del", "plata", "guita",
            "mierda", "uno", "menos", "una", "bomba", "vayan", "a", "laburar",
            "feminazis", "feministas", "chinos", "chino", "china", "villeros",
            "gorda", "gordo", "señora", "hola", "que", "dia", "judío", "peruanos",
            "trabajo", "bien", "ahí", "debe", "me", "el", "camión", "matarlos",
        ]
        comments = [
            make_comment(str(i), text=" ".join(rng.choices(vocab, k=rng.randint(1, 14))))
            for i in range(1000)
        ]
        flags = mark_slur_comments(comments, lexicon)
        expected = [slur_scan_oracle(c.text, lexicon.entries) for c in comments]
        assert flags == expected
        assert any(flags) and not all(flags)  # the fuzz corpus exercises both sides


# ---------------------------------------------------------------------------
# Article selection
# ---------------------------------------------------------------------------


def mk_corpus(marked_per_article: dict[str, int]):
    articles, comments, marks = [], [], []
    for article_id, n_marked in marked_per_article.items():
        articles.append(art(article_id, "cuerpo"))
        for i in range(n_marked):
            comments.append(make_comment(f"{article_id}_m{i}", article_id))
            marks.append(True)
        comments.append(make_comment(f"{article_id}_x", article_id))
        marks.append(False)
    return articles, comments, marks


class TestSelectArticles:
    def test_threshold(self):
        articles, comments, marks = mk_corpus({"a": 3, "b": 1})
        cfg = SamplingConfig(min_marked_comments=2)
        selected = select_articles(articles, comments, marks, cfg)
        assert [a.article_id for a in selected] == ["a"]

    def test_min_one(self):
        articles, comments, marks = mk_corpus({"b": 1})
        cfg = SamplingConfig(min_marked_comments=1)
        assert len(select_articles(articles, comments, marks, cfg)) == 1

    @given(st.dictionaries(st.text("ab", min_size=1, max_size=3), st.integers(0, 5), max_size=6))
    def test_monotone_in_threshold(self, spec):
        articles, comments, marks = mk_corpus(spec)
        sizes = []
        for minimum in (1, 2, 3):
            cfg = SamplingConfig(min_marked_comments=minimum)
            sizes.append(len(select_articles(articles, comments, marks, cfg)))
        assert sizes == sorted(sizes, reverse=True)


# ---------------------------------------------------------------------------
# Comment sampling
# ---------------------------------------------------------------------------


class TestSampling:
    def _comments(self, n, article_id="a1", **kwargs):
        return [make_comment(f"c{i}", article_id, **kwargs) for i in range(n)]

    def test_quota_applies(self, article):
        cfg = SamplingConfig(rng_seed=1)
        sample = sample_comments_for_annotation(article, self._comments(60), cfg)
        assert len(sample) == 50

    def test_fewer_than_quota_returns_all(self, article):
        cfg = SamplingConfig(rng_seed=1)
        sample = sample_comments_for_annotation(article, self._comments(30), cfg)
        assert len(sample) == 30

    def test_deterministic_given_seed(self, article):
        cfg = SamplingConfig(rng_seed=42)
        pool = self._comments(80)
        first = sample_comments_for_annotation(article, pool, cfg)
        second = sample_comments_for_annotation(article, pool, cfg)
        assert [c.comment_id for c in first] == [c.comment_id for c in second]

    def test_different_seeds_differ(self, article):
        pool = self._comments(300)
        a = sample_comments_for_annotation(article, pool, SamplingConfig(rng_seed=1))
        b = sample_comments_for_annotation(article, pool, SamplingConfig(rng_seed=2))
        assert [c.comment_id for c in a] != [c.comment_id for c in b]

    def test_url_and_media_excluded(self, article):
        pool = self._comments(10) + [
            make_comment("url1", "a1", has_url=True),
            make_comment("med1", "a1", has_media=True),
        ]
        sample = sample_comments_for_annotation(article, pool, SamplingConfig())
        ids = {c.comment_id for c in sample}
        assert "url1" not in ids and "med1" not in ids
        assert all(not c.has_url and not c.has_media for c in sample)

    def test_zero_eligible_warns_and_returns_empty(self, article, caplog):
        pool = [make_comment("u", "a1", has_url=True)]
        with caplog.at_level(logging.WARNING):
            sample = sample_comments_for_annotation(article, pool, SamplingConfig())
        assert sample == []
        assert any("no eligible comments" in r.message for r in caplog.records)


# ---------------------------------------------------------------------------
# Anonymization
# ---------------------------------------------------------------------------


class TestAnonymize:
    def test_basic(self):
        assert anonymize("@juan23 andá a laburar") == "@user andá a laburar"

    def test_identity_without_mentions(self):
        assert anonymize("sin menciones acá") == "sin menciones acá"

    def test_multiple_handles(self):
        assert anonymize("@a @b hola") == "@user @user hola"

    def test_email_untouched(self):
        assert anonymize("escribí a juan@mail.com") == "escribí a juan@mail.com"

    handle_texts = st.text(
        alphabet="abcZ9_@ áé.,\n", min_size=0, max_size=60
    )

    @given(handle_texts)
    @settings(max_examples=300)
    def test_matches_scan_oracle(self, text):
        assert anonymize(text) == anonymize_oracle(text)

    @given(handle_texts)
    def test_idempotent(self, text):
        once = anonymize(text)
        assert anonymize(once) == once


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


class TestPipeline:
    def _corpus(self):
        articles = [
            art("a1", "la cuarentena sigue", outlet="@diarioA"),
            art("a2", "noticia de deportes", outlet="@diarioA"),
            art("a3", "brote de covid en wuhan", outlet="@diarioB"),
            art("a4", "", outlet="@diarioB"),  # not linked to an article body
        ]
        comments = [
            make_comment("c1", "a1", "negra de mierda @ana"),
            make_comment("c2", "a1", "uno menos"),
            make_comment("c3", "a1", "qué lindo día"),
            make_comment("c4", "a1", "respuesta anidada", reply_depth=2),
            make_comment("c5", "a3", "hola @pedro"),
            make_comment("c6", "a3", "chinos de mierda"),
            make_comment("c7", "a2", "fuera de tema"),
        ]
        return articles, comments

    def test_ingest_filters_topic_body_and_depth(self):
        articles, comments = self._corpus()
        kept_articles, kept_comments = run_ingest(
            articles, comments, load_covid_keywords()
        )
        assert [a.article_id for a in kept_articles] == ["a1", "a3"]
        assert [c.comment_id for c in kept_comments] == ["c1", "c2", "c3", "c5", "c6"]

    def test_sampling_outputs_and_report(self):
        articles, comments = self._corpus()
        kept_articles, kept_comments = run_ingest(articles, comments, load_covid_keywords())
        cfg = SamplingConfig(min_marked_comments=2, comments_per_article=50, rng_seed=3)
        rows, report = run_sampling(kept_articles, kept_comments, load_lexicon(), cfg)
        # only a1 has two marked comments (c1, c2)
        assert {r["article_id"] for r in rows} == {"a1"}
        texts = {r["comment_id"]: r["text"] for r in rows}
        assert texts["c1"] == "negra de mierda @user"
        assert report["per_outlet"]["@diarioA"]["articles"] == 1
        assert report["total"]["comments"] == len(rows)

    def test_full_pipeline_deterministic(self):
        articles, comments = self._corpus()
        cfg = SamplingConfig(min_marked_comments=1, rng_seed=9)
        kept = run_ingest(articles, comments, load_covid_keywords())
        rows1, rep1 = run_sampling(*kept, load_lexicon(), cfg)
        rows2, rep2 = run_sampling(*kept, load_lexicon(), cfg)
        assert rows1 == rows2 and rep1 == rep2
