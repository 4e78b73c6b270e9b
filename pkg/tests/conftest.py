import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ctxhs.types import Article, Comment


@pytest.fixture
def article():
    return Article(
        article_id="a1",
        outlet="@diario",
        tweet_text="Coronavirus: nuevas medidas de cuarentena en la ciudad",
        body="El gobierno anunció hoy que la cuarentena sigue por dos semanas más.",
        url="https://example.com/nota",
        published_at="2020-06-01T10:00:00Z",
    )


def make_comment(comment_id, article_id="a1", text="un comentario", **kwargs):
    return Comment(comment_id=comment_id, article_id=article_id, text=text, **kwargs)


@pytest.fixture
def comments(article):
    return [
        make_comment(f"c{i}", article.article_id, f"comentario número {i}")
        for i in range(1, 7)
    ]
