"""Parallel TSV and M2 ingestion."""

import pytest

from fcg_lab.align import apply_edits
from fcg_lab.gec_ingest import (
    GecFormatError,
    ParallelPair,
    parse_m2,
    parse_parallel_tsv,
)

from conftest import FIXTURES
from oracles import replay_oracle


def test_parallel_row():
    pairs = parse_parallel_tsv("go at school\tgo to school\n")
    assert pairs == [
        ParallelPair(
            source_tokens=("go", "at", "school"),
            target_tokens=("go", "to", "school"),
            given_edits=None,
            origin="<string>:1",
        )
    ]


def test_parallel_identity_row():
    pairs = parse_parallel_tsv("same\tsame\n")
    assert pairs[0].source_tokens == pairs[0].target_tokens == ("same",)


def test_parallel_order_preserved():
    text = "a\tb\nc\td\ne\tf\n"
    pairs = parse_parallel_tsv(text, source="p.tsv")
    assert [p.origin for p in pairs] == ["p.tsv:1", "p.tsv:2", "p.tsv:3"]


def test_parallel_wrong_field_count():
    with pytest.raises(GecFormatError, match="fields"):
        parse_parallel_tsv("only one field\n")
    with pytest.raises(GecFormatError, match="fields"):
        parse_parallel_tsv("a\tb\tc\n")


def test_parallel_rejects_bom_and_cr():
    with pytest.raises(GecFormatError, match="byte order mark"):
        parse_parallel_tsv("﻿a\tb\n")
    with pytest.raises(GecFormatError, match="carriage return"):
        parse_parallel_tsv("a\tb\r\n")


def test_m2_substitution_block():
    pairs = parse_m2(
        "S I like play piano\nA 2 3|||R:VERB|||playing|||REQUIRED|||-NONE-|||0\n"
    )
    assert len(pairs) == 1
    pair = pairs[0]
    assert pair.source_tokens == ("I", "like", "play", "piano")
    assert pair.target_tokens == ("I", "like", "playing", "piano")
    (edit,) = pair.given_edits
    assert (edit.src_start, edit.src_end) == (2, 3)
    assert edit.tgt_tokens == ("playing",)
    assert edit.type == "R:VERB"


def test_m2_block_without_edits():
    pairs = parse_m2("S ok\n")
    assert pairs[0].target_tokens == pairs[0].source_tokens == ("ok",)
    assert pairs[0].given_edits == ()


def test_m2_insertion_block():
    pairs = parse_m2(
        "S arrive school x\nA 1 1|||M:PREP|||at|||REQUIRED|||-NONE-|||0\n"
    )
    pair = pairs[0]
    assert pair.target_tokens == ("arrive", "at", "school", "x")
    (edit,) = pair.given_edits
    assert (edit.src_start, edit.src_end) == (1, 1)
    assert edit.tgt_tokens == ("at",)


def test_m2_deletion_via_none_marker():
    pairs = parse_m2(
        "S he married with her\nA 2 3|||U:PREP|||-NONE-|||REQUIRED|||-NONE-|||0\n"
    )
    assert pairs[0].target_tokens == ("he", "married", "her")
    assert pairs[0].given_edits[0].tgt_tokens == ()


def test_m2_cumulative_offsets():
    text = (
        "S a b c\n"
        "A 0 1|||R:X|||q w|||REQUIRED|||-NONE-|||0\n"
        "A 2 3|||R:Y|||z|||REQUIRED|||-NONE-|||0\n"
    )
    pair = parse_m2(text)[0]
    assert pair.target_tokens == ("q", "w", "b", "z")
    first, second = pair.given_edits
    assert (first.tgt_start, first.tgt_end) == (0, 2)
    assert (second.tgt_start, second.tgt_end) == (3, 4)


def test_m2_noop_ignored():
    pairs = parse_m2("S ok good\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n")
    assert pairs[0].given_edits == ()
    assert pairs[0].target_tokens == ("ok", "good")


def test_m2_trailing_blank_lines():
    assert len(parse_m2("S a\n\n\n\n")) == 1


def test_m2_multiple_blocks_and_origins():
    pairs = parse_m2("S a\n\nS b\n", source="w.m2")
    assert [p.origin for p in pairs] == ["w.m2:block1", "w.m2:block2"]


def test_m2_annotator_filter():
    text = (
        "S go at school\n"
        "A 1 2|||R:PREP|||to|||REQUIRED|||-NONE-|||0\n"
        "A 1 2|||R:PREP|||into|||REQUIRED|||-NONE-|||1\n"
    )
    default = parse_m2(text)[0]
    assert default.target_tokens == ("go", "to", "school")
    other = parse_m2(text, annotator=1)[0]
    assert other.target_tokens == ("go", "into", "school")


def test_m2_a_line_outside_block():
    with pytest.raises(GecFormatError, match="outside"):
        parse_m2("A 0 1|||R:X|||y|||REQUIRED|||-NONE-|||0\n")


def test_m2_s_line_inside_block():
    with pytest.raises(GecFormatError, match="inside"):
        parse_m2("S a\nS b\n")


def test_m2_range_out_of_bounds():
    with pytest.raises(GecFormatError, match="out of bounds"):
        parse_m2("S a b\nA 1 5|||R:X|||y|||REQUIRED|||-NONE-|||0\n")


def test_m2_overlapping_edits():
    text = (
        "S a b c\n"
        "A 0 2|||R:X|||q|||REQUIRED|||-NONE-|||0\n"
        "A 1 3|||R:Y|||z|||REQUIRED|||-NONE-|||0\n"
    )
    with pytest.raises(GecFormatError, match="overlapping"):
        parse_m2(text)


def test_m2_malformed_field_count():
    with pytest.raises(GecFormatError, match="6"):
        parse_m2("S a\nA 0 1|||R:X|||y\n")


def test_m2_unrecognized_line():
    with pytest.raises(GecFormatError, match="unrecognized"):
        parse_m2("S a\nT nonsense\n")


def test_m2_empty_source_sentence():
    pairs = parse_m2("S\n")
    assert pairs[0].source_tokens == ()
    assert pairs[0].target_tokens == ()


def test_m2_edits_reproduce_target_on_fixture():
    pairs = parse_m2((FIXTURES / "pseudo.m2").read_text(), source="pseudo.m2")
    assert len(pairs) == 6
    for pair in pairs:
        replayed = apply_edits(pair.source_tokens, pair.given_edits)
        assert tuple(replayed) == pair.target_tokens
        assert replay_oracle(pair.source_tokens, pair.given_edits) == list(
            pair.target_tokens
        )


def test_parallel_fixture_parses():
    pairs = parse_parallel_tsv(
        (FIXTURES / "pseudo_parallel.tsv").read_text(), source="pseudo_parallel.tsv"
    )
    assert len(pairs) == 30
    assert all(p.given_edits is None for p in pairs)
