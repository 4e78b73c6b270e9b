"""Walk through the corpus pipeline on a small synthetic archive.

Builds a fake outlet archive, filters it to pandemic-related articles and
first-level replies, selects articles via slur-marked comments, then samples
and anonymizes replies for annotation. Run with:

    python demos/01_corpus_sampling.py
"""

import json

import numpy as np

from ctxhs.corpus import (
    load_covid_keywords,
    load_lexicon,
    run_ingest,
    run_sampling,
)
from ctxhs.types import Article, Comment, SamplingConfig

rng = np.random.default_rng(7)

print("=== 1. a tiny synthetic archive ===")
articles = [
    Article("a1", "@diarioA", "Nuevas medidas de aislamiento",
            "El gobierno extendió la cuarentena por dos semanas."),
    Article("a2", "@diarioA", "Resultados del fútbol de ayer",
            "La fecha del torneo dejó varios golazos."),
    Article("a3", "@diarioB", "Crece la ocupación de camas",
            "Los infectados por covid llegaron a un nuevo pico."),
    Article("a4", "@diarioB", "Tuit sin nota enlazada", ""),
]
filler = ["que", "dia", "esto", "es", "cualquiera", "basta", "de", "mentir"]
comments = []
for article in articles:
    for i in range(8):
        text = " ".join(rng.choice(filler, size=5))
        if i == 0:
            text = "@pedro negros de mierda váyanse"
        if i == 1:
            text = "uno menos, festejo"
        comments.append(Comment(f"{article.article_id}_c{i}", article.article_id, text))
comments.append(Comment("deep", "a1", "respuesta anidada", reply_depth=2))
print(f"{len(articles)} articles, {len(comments)} comments")

print("\n=== 2. ingest: topic filter + first-level replies ===")
kept_articles, kept_comments = run_ingest(articles, comments, load_covid_keywords())
print("kept articles:", [a.article_id for a in kept_articles])
print("kept comments:", len(kept_comments), "(nested reply and off-topic articles dropped)")

print("\n=== 3. selection + sampling + anonymization ===")
cfg = SamplingConfig(min_marked_comments=2, comments_per_article=5, rng_seed=42)
rows, report = run_sampling(kept_articles, kept_comments, load_lexicon(), cfg)
for row in rows[:6]:
    print(f"  {row['article_id']} / {row['comment_id']}: {row['text']}")
print("\nsampling report:")
print(json.dumps(report, indent=2, ensure_ascii=False))

print("\n=== 4. determinism: same seed, same sample ===")
rows_again, _ = run_sampling(kept_articles, kept_comments, load_lexicon(), cfg)
print("identical rerun:", rows == rows_again)
