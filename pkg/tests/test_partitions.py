import pytest
from hypothesis import given, strategies as st

from hedonic_mc import bell_number, code_to_coalitions, coalition_of, encode_coalition, partitions_iter
from hedonic_mc.errors import InvalidPartitionError, InvalidPlayerError
from hedonic_mc.partitions import bell_numbers_by_binomial, format_code, is_canonical, parse_code

from oracles import bell_by_counting, bell_dobinski, canonical, set_partitions


def test_bell_examples():
    assert bell_number(15) == 1_382_958_545
    assert bell_number(1) == 1
    assert bell_number(3) == 5


@pytest.mark.parametrize("n", range(1, 17))
def test_bell_against_dobinski_and_recurrence(n):
    assert bell_number(n) == bell_dobinski(n) == bell_numbers_by_binomial(16)[n]


def test_bell_rejects_out_of_range():
    with pytest.raises(InvalidPlayerError):
        bell_number(0)
    with pytest.raises(InvalidPlayerError):
        bell_number(17)


def test_small_enumerations():
    assert list(partitions_iter(2)) == [(1, 1), (1, 2)]
    three = list(partitions_iter(3))
    assert three == [(1, 1, 1), (1, 1, 2), (1, 2, 1), (1, 2, 2), (1, 2, 3)]
    assert (1, 2, 1, 2, 3) in set(partitions_iter(5))


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_complete_sorted_canonical(n):
    codes = list(partitions_iter(n))
    assert len(codes) == bell_number(n) == bell_by_counting(n)
    assert codes == sorted(codes)
    assert len(set(codes)) == len(codes)
    assert all(is_canonical(c) for c in codes)
    assert set(codes) == {canonical(p, n) for p in set_partitions(list(range(1, n + 1)))}


def test_decoding_examples():
    assert code_to_coalitions(5, (1, 2, 1, 2, 3)) == [
        encode_coalition(5, {1, 3}),
        encode_coalition(5, {2, 4}),
        encode_coalition(5, {5}),
    ]
    assert code_to_coalitions(3, (1, 1, 1)) == [7]
    assert code_to_coalitions(4, (1, 2, 3, 4)) == [8, 4, 2, 1]
    assert coalition_of(5, (1, 2, 1, 2, 3), 4) == encode_coalition(5, {2, 4})
    assert coalition_of(3, (1, 1, 1), 2) == 7
    assert coalition_of(5, (1, 2, 1, 2, 3), 5) == encode_coalition(5, {5})


@pytest.mark.parametrize("code", [(2, 1), (1, 3, 2), (1, 1, 0)])
def test_non_canonical_rejected(code):
    with pytest.raises(InvalidPartitionError):
        code_to_coalitions(len(code), code)


@given(st.integers(1, 7).flatmap(lambda n: st.sampled_from(list(partitions_iter(n)))))
def test_blocks_disjoint_and_cover(code):
    n = len(code)
    masks = code_to_coalitions(n, code)
    union = 0
    for m in masks:
        assert m and not union & m
        union |= m
    assert union == 2**n - 1
    for i in range(1, n + 1):
        assert coalition_of(n, code, i) in masks


@given(st.integers(1, 12).flatmap(lambda n: st.sampled_from(list(partitions_iter(min(n, 6)))) if n <= 6 else st.just(tuple(range(1, n + 1)))))
def test_format_parse_roundtrip(code):
    assert parse_code(format_code(code)) == code


def test_long_codes_use_commas():
    code = tuple(range(1, 11))
    assert format_code(code) == "1,2,3,4,5,6,7,8,9,10"
