"""Synthetic auction-site documents with the XMark element vocabulary, plus benchmark queries."""

from __future__ import annotations

import random
from xml.sax.saxutils import escape, quoteattr

QUERIES = {
    "Q01": "/site/regions",
    "Q02": "/site/closed_auctions",
    "Q03": "/site/regions/europe/item/mailbox/mail/text/keyword",
    "Q04": "/site/closed_auctions/closed_auction/annotation/description/parlist/listitem",
    "Q05": "/site/closed_auctions/closed_auction/annotation/description/parlist/listitem/parlist/listitem/*//keyword",
    "Q06": "/site/regions/*/item",
    "Q07": "//listitem//keyword",
    "Q08": "/site/regions/*/item//keyword",
    "Q09": "/site/regions/*/person[ address and (phone or homepage) ]",
    "Q10": "//listitem[.//keyword and .//emph]//parlist",
    "Q11": "/site/regions/*/item[ mailbox/mail/date ]/mailbox/mail",
    "Q12": "/*[ descendant::* ]",
    "Q13": "//*",
    "Q14": "//*//*",
    "Q15": "//*//*//*//*",
    "Q16": "//*//*//*//*//*//*//*//*",
}

REGIONS = ("africa", "asia", "australia", "europe", "namerica", "samerica")

_WORDS = (
    "gold silver antique vintage rare mint boxed signed original limited edition "
    "collector table chair lamp clock watch ring necklace painting print poster "
    "vase bowl plate guitar violin camera lens radio record book atlas map coin "
    "stamp card toy model train car bicycle quality shipping fast offer unique "
    "great condition works perfectly minor wear restored handmade imported "
    "classic modern rustic elegant sturdy light heavy small large blue red green"
).split()
_CITIES = ("Paris", "Tokyo", "Lima", "Oslo", "Cairo", "Sydney", "Toronto", "Madrid", "Dublin", "Seoul")
_COUNTRIES = ("France", "Japan", "Peru", "Norway", "Egypt", "Australia", "Canada", "Spain", "Ireland", "Korea")
_FIRST = ("Ana", "Bo", "Chen", "Dara", "Eli", "Femi", "Gus", "Hana", "Ivo", "Jun", "Kai", "Lea")
_LAST = ("Smith", "Okafor", "Tanaka", "Silva", "Novak", "Haddad", "Berg", "Rossi", "Kim", "Moreau")


class _Gen:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.out: list = []
        self.size = 0
        self.n_items = self.n_people = self.n_open = self.n_closed = self.n_cat = 0

    def w(self, s: str) -> None:
        self.out.append(s)
        self.size += len(s)

    def words(self, lo: int, hi: int) -> str:
        return " ".join(self.rng.choice(_WORDS) for _ in range(self.rng.randint(lo, hi)))

    def leaf(self, tag: str, text: str) -> None:
        self.w(f"<{tag}>{escape(text)}</{tag}>")

    def rich_text(self) -> None:
        # mixed content with inline markup
        self.w("<text>")
        for _ in range(self.rng.randint(1, 4)):
            self.w(escape(self.words(2, 8)) + " ")
            r = self.rng.random()
            if r < 0.35:
                self.leaf("keyword", self.words(1, 2))
            elif r < 0.55:
                self.leaf("emph", self.words(1, 2))
            elif r < 0.7:
                self.w("<bold>")
                self.w(escape(self.words(1, 2)))
                if self.rng.random() < 0.3:
                    self.leaf("keyword", self.words(1, 1))
                self.w("</bold>")
        self.w("</text>")

    def parlist(self, depth: int) -> None:
        self.w("<parlist>")
        for _ in range(self.rng.randint(1, 3)):
            self.w("<listitem>")
            if depth < 3 and self.rng.random() < 0.3:
                self.parlist(depth + 1)
            else:
                self.rich_text()
            self.w("</listitem>")
        self.w("</parlist>")

    def description(self) -> None:
        self.w("<description>")
        if self.rng.random() < 0.5:
            self.parlist(1)
        else:
            self.rich_text()
        self.w("</description>")

    def item(self) -> None:
        i = self.n_items
        self.n_items += 1
        feat = ' featured="yes"' if self.rng.random() < 0.1 else ""
        self.w(f'<item id="item{i}"{feat}>')
        self.leaf("location", self.rng.choice(_COUNTRIES))
        self.leaf("quantity", str(self.rng.randint(1, 5)))
        self.leaf("name", self.words(1, 3))
        self.leaf("payment", self.rng.choice(("Cash", "Creditcard", "Money order", "Personal check")))
        self.description()
        self.leaf("shipping", self.words(2, 6))
        for _ in range(self.rng.randint(1, 3)):
            self.w(f'<incategory category="category{self.rng.randint(0, max(self.n_cat, 1) - 1)}"/>')
        self.w("<mailbox>")
        for _ in range(self.rng.randint(0, 3)):
            self.w("<mail>")
            self.leaf("from", self.person_name())
            self.leaf("to", self.person_name())
            self.leaf("date", self.date())
            self.rich_text()
            self.w("</mail>")
        self.w("</mailbox>")
        self.w("</item>")

    def person_name(self) -> str:
        return f"{self.rng.choice(_FIRST)} {self.rng.choice(_LAST)}"

    def date(self) -> str:
        return f"{self.rng.randint(1, 12):02d}/{self.rng.randint(1, 28):02d}/{self.rng.randint(1998, 2001)}"

    def person(self) -> None:
        i = self.n_people
        self.n_people += 1
        self.w(f'<person id="person{i}">')
        name = self.person_name()
        self.leaf("name", name)
        self.leaf("emailaddress", "mailto:" + name.replace(" ", ".") + "@example.com")
        if self.rng.random() < 0.5:
            self.leaf("phone", f"+{self.rng.randint(1, 99)} ({self.rng.randint(10, 999)}) {self.rng.randint(1000000, 9999999)}")
        if self.rng.random() < 0.6:
            k = self.rng.randrange(len(_CITIES))
            self.w("<address>")
            self.leaf("street", f"{self.rng.randint(1, 99)} {self.rng.choice(_LAST)} St")
            self.leaf("city", _CITIES[k])
            self.leaf("country", _COUNTRIES[k])
            self.leaf("zipcode", str(self.rng.randint(10000, 99999)))
            self.w("</address>")
        if self.rng.random() < 0.4:
            self.leaf("homepage", f"http://www.example.com/~{name.split()[1].lower()}")
        if self.rng.random() < 0.5:
            self.leaf("creditcard", " ".join(str(self.rng.randint(1000, 9999)) for _ in range(4)))
        if self.rng.random() < 0.6:
            self.w(f'<profile income="{self.rng.randint(10000, 99999)}.{self.rng.randint(0, 99):02d}">')
            for _ in range(self.rng.randint(0, 3)):
                self.w(f'<interest category="category{self.rng.randint(0, max(self.n_cat, 1) - 1)}"/>')
            if self.rng.random() < 0.5:
                self.leaf("education", self.rng.choice(("High School", "College", "Graduate School", "Other")))
            self.leaf("business", self.rng.choice(("Yes", "No")))
            if self.rng.random() < 0.5:
                self.leaf("age", str(self.rng.randint(18, 80)))
            self.w("</profile>")
        if self.rng.random() < 0.5:
            self.w("<watches>")
            for _ in range(self.rng.randint(1, 3)):
                self.w(f'<watch open_auction="open_auction{self.rng.randint(0, max(self.n_open, 1) - 1)}"/>')
            self.w("</watches>")
        self.w("</person>")

    def annotation(self) -> None:
        self.w("<annotation>")
        self.w(f'<author person="person{self.rng.randint(0, max(self.n_people, 1) - 1)}"/>')
        self.description()
        self.leaf("happiness", str(self.rng.randint(1, 10)))
        self.w("</annotation>")

    def open_auction(self) -> None:
        i = self.n_open
        self.n_open += 1
        self.w(f'<open_auction id="open_auction{i}">')
        self.leaf("initial", f"{self.rng.uniform(1, 200):.2f}")
        if self.rng.random() < 0.4:
            self.leaf("reserve", f"{self.rng.uniform(50, 400):.2f}")
        for _ in range(self.rng.randint(0, 4)):
            self.w("<bidder>")
            self.leaf("date", self.date())
            self.leaf("time", f"{self.rng.randint(0, 23):02d}:{self.rng.randint(0, 59):02d}:00")
            self.w(f'<personref person="person{self.rng.randint(0, max(self.n_people, 1) - 1)}"/>')
            self.leaf("increase", f"{self.rng.uniform(1, 30):.2f}")
            self.w("</bidder>")
        self.leaf("current", f"{self.rng.uniform(1, 500):.2f}")
        self.w(f'<itemref item="item{self.rng.randint(0, max(self.n_items, 1) - 1)}"/>')
        self.w(f'<seller person="person{self.rng.randint(0, max(self.n_people, 1) - 1)}"/>')
        self.annotation()
        self.leaf("quantity", "1")
        self.leaf("type", self.rng.choice(("Regular", "Featured", "Dutch")))
        self.w("<interval>")
        self.leaf("start", self.date())
        self.leaf("end", self.date())
        self.w("</interval>")
        self.w("</open_auction>")

    def closed_auction(self) -> None:
        self.n_closed += 1
        self.w("<closed_auction>")
        self.w(f'<seller person="person{self.rng.randint(0, max(self.n_people, 1) - 1)}"/>')
        self.w(f'<buyer person="person{self.rng.randint(0, max(self.n_people, 1) - 1)}"/>')
        self.w(f'<itemref item="item{self.rng.randint(0, max(self.n_items, 1) - 1)}"/>')
        self.leaf("price", f"{self.rng.uniform(5, 900):.2f}")
        self.leaf("date", self.date())
        self.leaf("quantity", "1")
        self.leaf("type", self.rng.choice(("Regular", "Featured")))
        self.annotation()
        self.w("</closed_auction>")

    def category(self) -> None:
        i = self.n_cat
        self.n_cat += 1
        self.w(f'<category id="category{i}">')
        self.leaf("name", self.words(1, 2))
        self.description()
        self.w("</category>")


def generate_xmark(target_bytes: int = 1_000_000, seed: int = 0) -> bytes:
    """An XMark-shaped document of roughly ``target_bytes`` bytes (deterministic per seed).

    Section sizes keep XMark's proportions: items dominate, followed by
    people, open and closed auctions, with a small category graph.
    """
    g = _Gen(seed)
    unit = max(target_bytes, 2000) / 676_000
    n_items = max(6, int(430 * unit))
    n_people = max(2, int(255 * unit))
    n_open = max(1, int(120 * unit))
    n_closed = max(1, int(97 * unit))
    n_cat = max(1, int(10 * unit))

    g.w("<site>")
    g.w("<regions>")
    per_region = [n_items // len(REGIONS)] * len(REGIONS)
    for k in range(n_items % len(REGIONS)):
        per_region[k] += 1
    for region, count in zip(REGIONS, per_region):
        g.w(f"<{region}>")
        for _ in range(count):
            g.item()
        g.w(f"</{region}>")
    g.w("</regions>")
    g.w("<categories>")
    for _ in range(n_cat):
        g.category()
    g.w("</categories>")
    g.w("<catgraph>")
    for _ in range(n_cat):
        g.w(f'<edge from={quoteattr("category%d" % g.rng.randrange(n_cat))} '
            f'to={quoteattr("category%d" % g.rng.randrange(n_cat))}/>')
    g.w("</catgraph>")
    g.w("<people>")
    for _ in range(n_people):
        g.person()
    g.w("</people>")
    g.w("<open_auctions>")
    for _ in range(n_open):
        g.open_auction()
    g.w("</open_auctions>")
    g.w("<closed_auctions>")
    for _ in range(n_closed):
        g.closed_auction()
    g.w("</closed_auctions>")
    g.w("</site>")
    return "".join(g.out).encode("utf-8")
