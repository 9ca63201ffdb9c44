"""One-shot generator for the static test fixtures.

Run from this directory: python3 make_fixtures.py
Kept for provenance; the checked-in TSVs are the artifacts under test.
"""

from pathlib import Path

HERE = Path(__file__).parent


def span(sentence: str, tok_start: int, tok_end: int) -> str:
    starts, pos = [], 0
    toks = sentence.split(" ")
    for tok in toks:
        starts.append(pos)
        pos += len(tok) + 1
    lo = starts[tok_start]
    hi = starts[tok_end - 1] + len(toks[tok_end - 1])
    return f"{lo}:{hi}"


GOLD_TRAIN = [
    ("And we can put posters to remind the smokers the risks they are taking .", 8, 10,
     "The <verb> <<remind>> requires the <preposition> <of> before the thing remembered : remind A of B ."),
    ("I look forward to hear from you .", 3, 5,
     "After <look forward to> , use the <gerund> form of the <verb> , not the base form ."),
    ("We discussed about the problem .", 2, 3,
     "The <verb> <<discuss>> is a <transitive verb> , so the <preposition> <<about>> is not necessary ."),
    ("She is good in math .", 3, 4,
     "Use the <preposition> <at> with <<good>> to express skill in a subject ."),
    ("He arrived to the station .", 2, 3,
     "The <verb> <<arrive>> takes the <preposition> <at> before a place such as a station ."),
    ("I am interested on science .", 3, 4,
     "The <adjective> <<interested>> takes the <preposition> <in> ."),
    ("We went at school yesterday .", 2, 3,
     "Use the <preposition> <to> with <<go>> to express movement toward a place ."),
    ("They listen music every day .", 1, 3,
     "The <verb> <<listen>> requires the <preposition> <to> before its object ."),
    ("It depends of the weather .", 2, 3,
     "The <verb> <<depend>> takes the <preposition> <on> ."),
    ("She married with a doctor .", 1, 3,
     "The <verb> <<marry>> is a <transitive verb> , so the <preposition> <<with>> is not necessary ."),
    ("I will explain you the rule .", 2, 4,
     "The <verb> <<explain>> requires the <preposition> <to> before the person told ."),
    ("We are waiting the bus .", 2, 4,
     "The <verb> <<wait>> requires the <preposition> <for> before its object ."),
]

GOLD_DEV = [
    ("He is good in tennis .", 3, 4,
     "Use the <preposition> <at> with <<good>> to express skill in a subject ."),
    ("I will arrive to London .", 3, 4,
     "The <verb> <<arrive>> takes the <preposition> <at> or <in> before a place ."),
    ("They listen the radio .", 1, 3,
     "The <verb> <<listen>> requires the <preposition> <to> before its object ."),
    ("It depend of you .", 2, 3,
     "The <verb> <<depend>> takes the <preposition> <on> ."),
]

GOLD_TEST = [
    ("She is good in math .", 3, 4,
     "Use the <preposition> <at> with <<good>> to express skill in a subject ."),
    ("It depends of the weather .", 2, 3,
     "The <verb> <<depend>> takes the <preposition> <on> ."),
    ("He is interested on music .", 3, 4,
     "The <adjective> <<interested>> takes the <preposition> <in> ."),
    ("We discussed about the plan .", 2, 3,
     "The <verb> <<discuss>> is a <transitive verb> , so the <preposition> <<about>> is not necessary ."),
    ("You must explain me the rule .", 2, 4,
     "The <verb> <<explain>> requires the <preposition> <to> before the person told ."),
    ("He waits his friend .", 1, 3,
     "The <verb> <<wait>> requires the <preposition> <for> before its object ."),
    ("The meeting is at Monday .", 3, 4,
     "Use the <preposition> <on> with days of the week ."),
    ("She apologized the delay .", 1, 3,
     "The <verb> <<apologize>> requires the <preposition> <for> before the cause ."),
]

PARALLEL = [
    ("I go at school every day .", "I go to school every day ."),
    ("She arrived school early .", "She arrived at school early ."),
    ("He married with her .", "He married her ."),
    ("We depend of him .", "We depend on him ."),
    ("They listen music always .", "They listen to music always ."),
    ("I am good in math .", "I am good at math ."),
    ("We discussed about it .", "We discussed it ."),
    ("I am interested on science .", "I am interested in science ."),
    ("She waits the bus .", "She waits for the bus ."),
    ("He entered into the room .", "He entered the room ."),
    ("In Monday I went home .", "On Monday I went home ."),
    ("I arrive to Paris tomorrow .", "I arrive in Paris tomorrow ."),
    ("He go to school at Monday .", "He goes to school on Monday ."),
    ("Monday we rest .", "On Monday we rest ."),
    ("She is angry on me .", "She is angry at me ."),
    ("I am afraid from dogs .", "I am afraid of dogs ."),
    ("We arrived to the hotel at night .", "We arrived at the hotel at night ."),
    ("They play football in Sundays .", "They play football on Sundays ."),
    ("I like play piano .", "I like playing piano ."),
    ("He have a car .", "He has a car ."),
    ("They is happy .", "They are happy ."),
    ("All good here .", "All good here ."),
    ("We eat rice .", "We eat rice every day ."),
    ("The the cat sat .", "The cat sat ."),
    ("I red the book .", "I read the book ."),
    ("She sing well .", "She sings well ."),
    ("It rain today .", "It rains today ."),
    ("I wants tea .", "I want tea ."),
    ("He jumped on to the table .", "He jumped onto the table ."),
    ("Good morning .", "Good evening ."),
]

M2 = """S I like play piano
A 2 3|||R:VERB|||playing|||REQUIRED|||-NONE-|||0

S We discussed about the problem .
A 2 3|||U:PREP|||-NONE-|||REQUIRED|||-NONE-|||0

S She arrived school early .
A 2 2|||M:PREP|||at|||REQUIRED|||-NONE-|||0

S I am good in math .
A 3 4|||R:PREP|||at|||REQUIRED|||-NONE-|||0

S ok good
A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0

S He have a car .
A 1 2|||R:VERB:SVA|||has|||REQUIRED|||-NONE-|||0
"""

LABELS = [
    ("gold_test.tsv:1", "correct"),
    ("gold_test.tsv:2", "correct"),
    ("gold_test.tsv:3", "correct"),
    ("gold_test.tsv:4", "correct"),
    ("gold_test.tsv:5", "correct"),
    ("gold_test.tsv:6", "incorrect"),
    ("gold_test.tsv:7", "incorrect"),
    ("gold_test.tsv:8", "incorrect"),
]

CATEGORIES = [
    ("completely-incorrect-comment", 26),
    ("correct-explanation-incorrect-suggestion", 11),
    ("correct-suggestion-incorrect-evaluation", 7),
    ("human-annotation-error", 6),
]

PREPOSITIONS = """about above across after against along among around at before
behind below beneath beside between beyond by despite down during
except for from in inside into like near of off on onto out outside over
past since through throughout till to toward towards under underneath until
up upon with within without""".split()


def rows(table):
    out = []
    for sentence, lo, hi, comment in table:
        out.append(f"{sentence}\t{span(sentence, lo, hi)}\t{comment}\n")
    return "".join(out)


def main():
    (HERE / "gold_train.tsv").write_text(rows(GOLD_TRAIN), newline="\n")
    (HERE / "gold_dev.tsv").write_text(rows(GOLD_DEV), newline="\n")
    (HERE / "gold_test.tsv").write_text(rows(GOLD_TEST), newline="\n")
    (HERE / "pseudo_parallel.tsv").write_text(
        "".join(f"{s}\t{t}\n" for s, t in PARALLEL), newline="\n"
    )
    (HERE / "pseudo.m2").write_text(M2, newline="\n")
    (HERE / "labels.tsv").write_text(
        "".join(f"{i}\t{label}\n" for i, label in LABELS), newline="\n"
    )
    lines = []
    n = 0
    for category, count in CATEGORIES:
        for _ in range(count):
            n += 1
            lines.append(f"c{n}\t{category}\n")
    (HERE / "categories.tsv").write_text("".join(lines), newline="\n")
    (HERE / "lexicon.txt").write_text(
        "# closed-class prepositions, one per line\n"
        + "".join(p + "\n" for p in PREPOSITIONS),
        newline="\n",
    )
    first = rows(GOLD_TRAIN).split("\n", 1)[0].split("\t")
    assert first[1] == "37:48", first
    print("fixtures written; worked-example span check:", first[1])


if __name__ == "__main__":
    main()
