import itertools

import pytest

from newslens.errors import UnsortedInput
from newslens.ner import Category, EntityMention
from newslens.resolve import (
    AbbreviationCorpus,
    default_abbreviations,
    expand_abbreviation,
    normalize_surface,
    resolve_article,
    resolve_global,
    token_boundary_contains,
)


def mention(surface, category=Category.PERSON, pos=0, tagger="builtin"):
    return EntityMention(
        surface=surface,
        category=category,
        char_start=pos * 100,
        char_end=pos * 100 + max(1, len(surface)),
        paragraph_index=0,
        sentence_index=0,
        tagger=tagger,
    )


def mentions_of(*specs):
    return [
        mention(surface, category, pos)
        for pos, (surface, category) in enumerate(specs)
    ]


class TestNormalizeSurface:
    def test_dotted_acronym(self):
        assert normalize_surface("F.B.I.") == "FBI"

    def test_whitespace_collapse(self):
        assert normalize_surface("  Nancy  Pelosi ") == "Nancy Pelosi"

    def test_acronym_inside_phrase(self):
        assert normalize_surface("U.S. House") == "US House"

    def test_case_preserved(self):
        assert normalize_surface("McDonald's  Corp.") == "McDonald's Corp."

    def test_single_initials_kept(self):
        assert normalize_surface("George W. Bush") == "George W. Bush"

    def test_honorific_period_kept(self):
        assert normalize_surface("Ms. Pelosi") == "Ms. Pelosi"


class TestExpandAbbreviation:
    def test_corpus_lookup(self):
        corpus = AbbreviationCorpus({"fbi": ("Federal Bureau of Investigation", None)})
        assert expand_abbreviation("FBI", corpus) == "Federal Bureau of Investigation"

    def test_unknown_absent(self):
        assert expand_abbreviation("ZZZQ", AbbreviationCorpus({})) is None

    def test_article_context_initials_beat_corpus(self):
        corpus = AbbreviationCorpus({})
        assert (
            expand_abbreviation("WHO", corpus, ["World Health Organization"])
            == "World Health Organization"
        )

    def test_initials_skip_connectors(self):
        assert (
            expand_abbreviation("FBI", AbbreviationCorpus({}), ["Federal Bureau of Investigation"])
            == "Federal Bureau of Investigation"
        )

    def test_category_mismatch_blocks_corpus_entry(self):
        corpus = AbbreviationCorpus({"us": ("United States", Category.LOCATION)})
        assert expand_abbreviation("US", corpus, category=Category.PERSON) is None
        assert expand_abbreviation("US", corpus, category=Category.LOCATION) == "United States"

    def test_default_corpus(self):
        assert (
            expand_abbreviation("FBI", default_abbreviations())
            == "Federal Bureau of Investigation"
        )


class TestTokenBoundaryContains:
    @pytest.mark.parametrize(
        "haystack,needle,expected",
        [
            ("Alexandria Ocasio-Cortez", "Ocasio-Cortez", True),
            ("Alexandria Ocasio-Cortez", "Cortez", True),
            ("Alexandria Ocasio-Cortez", "Alexandria Ocasio-Cortez", True),
            ("Annapolis", "Ann", False),
            ("bUSh", "US", False),
            ("Nancy Pelosi", "Pelosi", True),
            ("Nancy Pelosi", "pelosi", False),  # case-sensitive
            ("O'Brien", "Brien", False),  # apostrophe joins
            ("US House", "US", True),
            ("Pelosi", "Nancy Pelosi", False),
        ],
    )
    def test_cases(self, haystack, needle, expected):
        assert token_boundary_contains(haystack, needle) is expected


class TestResolveArticle:
    def test_full_name_then_short_form(self):
        result = resolve_article(
            mentions_of(
                ("Alexandria Ocasio-Cortez", Category.PERSON),
                ("Ocasio-Cortez", Category.PERSON),
            )
        )
        assert len(result.entities) == 1
        assert result.entities[0].full_name == "Alexandria Ocasio-Cortez"
        assert [l.entity_id for l in result.links] == [1, 1]

    def test_categories_partition(self):
        result = resolve_article(
            mentions_of(("Nancy Pelosi", Category.PERSON), ("Paris", Category.LOCATION))
        )
        assert len(result.entities) == 2
        assert {e.category for e in result.entities} == {Category.PERSON, Category.LOCATION}

    def test_most_recent_container_wins(self):
        result = resolve_article(
            mentions_of(
                ("Michael Jordan", Category.PERSON),
                ("James Jordan", Category.PERSON),
                ("Jordan", Category.PERSON),
            )
        )
        by_id = {e.entity_id: e.full_name for e in result.entities}
        assert by_id[result.links[2].entity_id] == "James Jordan"

    def test_acronym_expansion_before_matching(self):
        corpus = AbbreviationCorpus({"fbi": ("Federal Bureau of Investigation", None)})
        result = resolve_article(
            mentions_of(
                ("F.B.I.", Category.ORGANIZATION),
                ("Federal Bureau of Investigation", Category.ORGANIZATION),
            ),
            corpus,
        )
        assert len(result.entities) == 1
        assert result.entities[0].full_name == "Federal Bureau of Investigation"

    def test_acronym_without_expansion_keeps_normalized_form(self):
        result = resolve_article(mentions_of(("F.B.I.", Category.ORGANIZATION)))
        assert result.entities[0].full_name == "FBI"

    def test_forward_occurrence_counter(self):
        result = resolve_article(
            mentions_of(("Pelosi", Category.PERSON), ("Nancy Pelosi", Category.PERSON))
        )
        assert len(result.entities) == 2
        assert result.forward_occurrences == 1

    def test_unsorted_input_rejected(self):
        ms = mentions_of(("A B", Category.PERSON), ("C D", Category.PERSON))
        with pytest.raises(UnsortedInput):
            resolve_article(list(reversed(ms)))

    def test_mixed_taggers_rejected(self):
        ms = [mention("A B", pos=0, tagger="x"), mention("C D", pos=1, tagger="y")]
        with pytest.raises(ValueError):
            resolve_article(ms)

    def test_totality(self):
        ms = mentions_of(
            ("Nancy Pelosi", Category.PERSON),
            ("Pelosi", Category.PERSON),
            ("Paris", Category.LOCATION),
            ("Pelosi", Category.ORGANIZATION),
        )
        result = resolve_article(ms)
        assert len(result.links) == len(ms)
        for link, m in zip(result.links, ms):
            entity = next(e for e in result.entities if e.entity_id == link.entity_id)
            assert entity.category == m.category

    def test_idempotence(self):
        ms = mentions_of(
            ("Alexandria Ocasio-Cortez", Category.PERSON),
            ("Ocasio-Cortez", Category.PERSON),
            ("Michael Jordan", Category.PERSON),
            ("Jordan", Category.PERSON),
        )
        a = resolve_article(ms)
        b = resolve_article(ms)
        assert [e.full_name for e in a.entities] == [e.full_name for e in b.entities]
        assert [l.entity_id for l in a.links] == [l.entity_id for l in b.links]


# Independent oracle: for each mention scan ALL prior entities of the
# category (no recency list), keep every container, pick the one whose
# last use is latest. Quadratic on purpose.
def oracle_partition(surfaces_categories, corpus):
    entities = []  # (name, category, last_use)
    assignment = []
    for step, (surface, category) in enumerate(surfaces_categories):
        name = normalize_surface(surface)
        if len(name.split()) == 1 and name.isupper() and len(name) >= 2:
            context = [
                e[0] for e in sorted(
                    (e for e in entities if e[1] == category),
                    key=lambda e: -e[2],
                )
            ]
            expansion = expand_abbreviation(name, corpus, context, category)
            if expansion is not None:
                name = normalize_surface(expansion)
        containers = [
            i for i, (full, cat, _) in enumerate(entities)
            if cat == category and token_boundary_contains(full, name)
        ]
        if containers:
            chosen = max(containers, key=lambda i: entities[i][2])
            entities[chosen] = (entities[chosen][0], category, step)
        else:
            entities.append((name, category, step))
            chosen = len(entities) - 1
        assignment.append(chosen)
    return assignment, [e[0] for e in entities]


NAMES = ["Alexandria Ocasio-Cortez", "Ocasio-Cortez", "James Jordan", "Jordan"]
CATEGORIES = [Category.PERSON, Category.ORGANIZATION]


class TestOracleEquivalence:
    def test_exhaustive_short_sequences(self):
        # full enumeration up to length 4 here; acceptance goes to 6
        corpus = AbbreviationCorpus({})
        alphabet = list(itertools.product(NAMES, CATEGORIES))
        for length in range(0, 5):
            for combo in itertools.product(alphabet, repeat=length):
                ms = mentions_of(*combo)
                result = resolve_article(ms, corpus)
                got = [l.entity_id - 1 for l in result.links]
                want, names = oracle_partition(combo, corpus)
                assert got == want, combo
                assert [e.full_name for e in result.entities] == names


class TestContainmentInvariant:
    def test_every_link_target_contains_its_mention(self):
        import random

        rng = random.Random(4242)
        corpus = default_abbreviations()
        surfaces = [
            "Nancy Pelosi", "Pelosi", "Ms. Pelosi", "F.B.I.",
            "Federal Bureau of Investigation", "Michael Jordan", "Jordan",
            "New York City", "New York",
        ]
        for _ in range(300):
            combo = [
                (rng.choice(surfaces), rng.choice(list(Category)))
                for _ in range(rng.randrange(0, 8))
            ]
            ms = mentions_of(*combo)
            result = resolve_article(ms, corpus)
            by_id = {e.entity_id: e for e in result.entities}
            for link in result.links:
                name = normalize_surface(link.mention.surface)
                target = by_id[link.entity_id].full_name
                is_acronym = name.isupper() and len(name) >= 2 and " " not in name
                contained = token_boundary_contains(target, name)
                if not contained and is_acronym:
                    # expansion path: target initials spell the acronym, or
                    # the corpus expansion is contained in the target
                    initials = "".join(
                        t[0].upper()
                        for t in target.split()
                        if t.lower() not in {"of", "the", "and", "for", "&"} and t[0].isalpha()
                    )
                    corpus_full = expand_abbreviation(
                        name, corpus, category=link.mention.category
                    )
                    contained = initials == name or (
                        corpus_full is not None
                        and token_boundary_contains(target, normalize_surface(corpus_full))
                    )
                assert contained, (link.mention.surface, target)


class _FakeRegistry:
    def __init__(self):
        self.rows = {}

    def upsert_entity(self, full_name, category):
        key = (full_name, category)
        if key not in self.rows:
            self.rows[key] = len(self.rows) + 100
        return self.rows[key]


class TestResolveGlobal:
    def test_exact_match_reuses_id(self):
        from newslens.resolve import ResolvedEntity

        registry = _FakeRegistry()
        existing = registry.upsert_entity("Nancy Pelosi", Category.PERSON)
        mapping = resolve_global(
            [ResolvedEntity(1, "Nancy Pelosi", Category.PERSON)], registry
        )
        assert mapping == {1: existing}

    def test_empty_registry_inserts_all(self):
        from newslens.resolve import ResolvedEntity

        registry = _FakeRegistry()
        locals_ = [
            ResolvedEntity(1, "Nancy Pelosi", Category.PERSON),
            ResolvedEntity(2, "Paris", Category.LOCATION),
        ]
        mapping = resolve_global(locals_, registry)
        assert len(set(mapping.values())) == 2

    def test_category_mismatch_never_merges(self):
        from newslens.resolve import ResolvedEntity

        registry = _FakeRegistry()
        person = registry.upsert_entity("Nancy Pelosi", Category.PERSON)
        mapping = resolve_global(
            [ResolvedEntity(1, "Pelosi", Category.ORGANIZATION)], registry
        )
        assert mapping[1] != person
        assert len(registry.rows) == 2

    def test_applied_twice_is_noop(self):
        from newslens.resolve import ResolvedEntity

        registry = _FakeRegistry()
        locals_ = [ResolvedEntity(1, "Nancy Pelosi", Category.PERSON)]
        first = resolve_global(locals_, registry)
        snapshot = dict(registry.rows)
        second = resolve_global(locals_, registry)
        assert first == second
        assert registry.rows == snapshot
