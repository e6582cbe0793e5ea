import json

import pytest

from oeforge.corpus import DictEntry, ParallelPair, Store, TextFragment

# The four adaptation-task rows: (en, ang) and related fields used across tests.
FORWARD_EN = "xxi. what kind of men the deans of the monastery must be."
FORWARD_ANG = "xxi. hwilce mynstres teoðingealdras beon sceolon."
BACK_ANG = "se oðer him andwirde and cwæð :"
BACK_EN = "the second answered him and said :"
COMPLETION_ANG = (
    "and fæste mann þærto swa fela daga swa þærto fæstene arærde wæron and þenung togesett is."
)
DEFINITION_WORD = "getoge"
DEFINITION_TEXT = (
    "A tugging; contractio; contraction; convulsio; convulsion; cramp; spasm; spasmus"
)

# Known failure-mode outputs observed in base models.
LOOPED_OUTPUT = (
    "Thæt is, at stoc twelve hides; and hi hafa meth meth hund mancusa golds, "
    "and thæt ic monæstære fræolice fræolice fræolice fræolice fræolice fræolice "
    "fræolice fræolice"
)
NON_TRANSLATED_OUTPUT = (
    "the roman people first called it by that name, because on the first day of "
    "the month he established the roman empire and overthrew those who formerly "
    "had destroyed it"
)
HALLUCINATED_OUTPUT = (
    "he gefeng amyntas, his modorbrothor, and eft pannenio, his herefore, and eft philotas"
)

# Human reference sentence reused as a clean-text fixture.
HUMAN_REFERENCE = "ðæt is æt stoce twelf hida"

MONO_ANG_FIXTURES = [
    "se cyning cwæð to ðam folce ðæt hi sceoldon ða lare healdan",
    "and se biscop ferde to ðam mynstre on ðam ilcan geare",
    "hwilce mynstres teoðingealdras beon sceolon on ðisse stowe",
    "ða andswaredon ða gebroðru and cwædon ðæt hi woldon",
    "on ðam dagum wæs mycel hunger geond eall ðæt land",
    "se oðer him andwirde and cwæð ðæt he nolde faran",
    "ðæt is æt stoce twelf hida and ðritig mancusa goldes",
    "and hi ealle sungon and herodon god on heora gebedum",
]

PAIR_FIXTURES = [
    (FORWARD_EN, FORWARD_ANG),
    (BACK_EN, BACK_ANG),
    ("that is, at stoke twelve hides", HUMAN_REFERENCE),
    ("the king said to the people", "se cyning cwæð to ðam folce"),
    ("the bishop went to the minster", "se biscop ferde to ðam mynstre"),
    ("they all sang and praised god", "hi ealle sungon and herodon god"),
]

DICT_FIXTURES = [
    (DEFINITION_WORD, DEFINITION_TEXT),
    ("cyning", "A king; rex"),
    ("mynster", "A monastery, minster; monasterium"),
    ("biscop", "A bishop; episcopus"),
]


@pytest.fixture
def store(tmp_path):
    return Store(tmp_path / "store")


@pytest.fixture
def populated_store(tmp_path):
    """Store with monolingual fragments, human pairs, and dictionary entries."""
    st = Store(tmp_path / "store")
    for text in MONO_ANG_FIXTURES:
        st.add_fragment(TextFragment("", "ANG", text, "fixture"))
    for en, ang in PAIR_FIXTURES:
        st.add_pair(
            ParallelPair(
                id="",
                en=TextFragment("", "EN", en, "fixture"),
                ang=TextFragment("", "ANG", ang, "fixture"),
                provenance="human",
            )
        )
    for headword, definition in DICT_FIXTURES:
        st.add_dict_entry(DictEntry(headword, definition))
    return st


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
    return path
