import random

import pytest

from rumlem.core.errors import MalformedEntry, UnknownVariety
from rumlem.core.model import (
    Analysis,
    FeatureBundle,
    FormRecord,
    Gender,
    Mood,
    Number,
    Person,
    PosCategory,
    RawEntry,
    Tense,
    Variety,
    VerbForm,
    collation_key,
    lookup_key,
    normalize,
    parse_varieties,
    sort_analyses,
)


def test_variety_canonical_order() -> None:
    assert [variety.value for variety in Variety] == [
        "sursilvan",
        "sutsilvan",
        "surmiran",
        "puter",
        "vallader",
        "rumantsch-grischun",
    ]
    assert Variety.SURSILVAN.rank == 0
    assert Variety.RUMANTSCH_GRISCHUN.rank == 5


def test_variety_parse_round_trip() -> None:
    for variety in Variety:
        assert Variety.parse(str(variety)) is variety
        assert Variety.parse(variety.code) is variety
        assert Variety.parse(variety.value.upper()) is variety


def test_variety_parse_aliases() -> None:
    assert Variety.parse("rm-vallader") is Variety.VALLADER
    assert Variety.parse("RG") is Variety.RUMANTSCH_GRISCHUN
    assert Variety.parse("Rumantsch Grischun") is Variety.RUMANTSCH_GRISCHUN


def test_variety_parse_rejects_unknown_label() -> None:
    with pytest.raises(UnknownVariety):
        Variety.parse("ladin")


def test_parse_varieties_sorts_and_deduplicates() -> None:
    assert parse_varieties(["vallader", "sursilvan", "rm-vallader", ""]) == [
        Variety.SURSILVAN,
        Variety.VALLADER,
    ]


def test_pos_from_hint() -> None:
    assert PosCategory.from_hint("n") is PosCategory.NOUN
    assert PosCategory.from_hint("Adj.") is PosCategory.ADJECTIVE
    assert PosCategory.from_hint("v") is PosCategory.VERB
    assert PosCategory.from_hint("adv") is PosCategory.OTHER


def test_normalize_unifies_apostrophes_and_composes() -> None:
    assert normalize("d'eira") == "d’eira"
    assert normalize("fomantà") == "fomantà"
    assert lookup_key("FOMANTADA") == "fomantada"
    assert lookup_key("Fomantà") == "fomantà"


def test_collation_key_ignores_accents_first() -> None:
    assert collation_key("fomantà") < collation_key("fomantada")
    assert sorted(["fomanto", "fomantar"], key=collation_key) == ["fomantar", "fomanto"]


def test_feature_bundle_serializes_in_table_order() -> None:
    bundle = FeatureBundle(
        PosCategory.VERB,
        gender=Gender.FEM,
        number=Number.SG,
        verb_form=VerbForm.PTCP,
        tense=Tense.PST,
    )
    assert bundle.serialize() == "PoS=V; VerbForm=PTCP; Tense=PST; Gender=FEM; Number=SG"
    assert bundle.compact() == "V;PTCP;PST;FEM;SG"


def test_feature_bundle_parse_compact_alias() -> None:
    assert FeatureBundle.parse("ADJ;MASC;SG") == FeatureBundle(
        PosCategory.ADJECTIVE, gender=Gender.MASC, number=Number.SG
    )


def test_feature_bundle_rejects_verb_features_on_nouns() -> None:
    with pytest.raises(ValueError):
        FeatureBundle(PosCategory.NOUN, tense=Tense.PST)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "Gender=FEM",
        "PoS=N; Colour=red",
        "PoS=N; PoS=V",
        "N;BLUE",
    ],
)
def test_feature_bundle_parse_rejects_invalid(text: str) -> None:
    with pytest.raises(ValueError):
        FeatureBundle.parse(text)


def _random_bundle(rng: random.Random) -> FeatureBundle:
    pos = rng.choice(list(PosCategory))

    def maybe(values: list[object]) -> object:
        return rng.choice([None, *values])

    verb = pos is PosCategory.VERB
    return FeatureBundle(
        pos,
        gender=maybe(list(Gender)),  # type: ignore[arg-type]
        number=maybe(list(Number)),  # type: ignore[arg-type]
        verb_form=maybe(list(VerbForm)) if verb else None,  # type: ignore[arg-type]
        tense=maybe(list(Tense)) if verb else None,  # type: ignore[arg-type]
        person=maybe(list(Person)) if verb else None,  # type: ignore[arg-type]
        mood=maybe(list(Mood)) if verb else None,  # type: ignore[arg-type]
    )


def test_feature_bundle_serialization_round_trips() -> None:
    rng = random.Random(7)
    for _ in range(500):
        bundle = _random_bundle(rng)
        assert FeatureBundle.parse(bundle.serialize()) == bundle
        assert FeatureBundle.parse(bundle.compact()) == bundle


def test_raw_entry_requires_both_fields() -> None:
    with pytest.raises(MalformedEntry):
        RawEntry("armaziun", "   ", Variety.SURSILVAN)
    with pytest.raises(MalformedEntry):
        RawEntry(" ", "Bewaffnung", Variety.SURSILVAN)


def test_raw_entry_blank_hints_become_none() -> None:
    entry = RawEntry("armaziun", "Bewaffnung", Variety.SURSILVAN, pos_hint=" ", gender_hint="")
    assert entry.pos_hint is None
    assert entry.gender_hint is None


def test_form_record_normalizes_and_rejects_phrases() -> None:
    record = FormRecord(
        "d'", "d'", FeatureBundle(PosCategory.OTHER), "von  dem", Variety.VALLADER
    )
    assert record.surface == "d’"
    assert record.gloss == "von dem"
    with pytest.raises(MalformedEntry):
        FormRecord("dar fö", "dar fö", FeatureBundle(PosCategory.VERB), "x", Variety.VALLADER)


def test_sort_analyses_orders_by_pos_then_lemma_then_gloss() -> None:
    adj = FeatureBundle(PosCategory.ADJECTIVE, gender=Gender.FEM, number=Number.SG)
    noun = FeatureBundle(PosCategory.NOUN, gender=Gender.FEM, number=Number.SG)
    analyses = [
        Analysis("fomantada", noun, "Hungrige", Variety.VALLADER),
        Analysis("fomantà", adj, "hungrig", Variety.VALLADER),
        Analysis("fomantada", noun, "Ausgehungerte", Variety.VALLADER),
        Analysis("fomantà", adj, "ausgehungert", Variety.VALLADER),
        Analysis("fomantà", adj, "hungrig", Variety.VALLADER),
    ]
    assert [(a.lemma, a.gloss) for a in sort_analyses(analyses)] == [
        ("fomantà", "ausgehungert"),
        ("fomantà", "hungrig"),
        ("fomantada", "Ausgehungerte"),
        ("fomantada", "Hungrige"),
    ]
