import numpy as np
import pytest

from mope import Alphabet
from mope.editops import (DEL, END_OP, INS, REP, EditApplicationError, EditOp,
                          OpSpace, apply_edits, levenshtein, min_edit_script,
                          validate_script)

ALPHA = "abcdefghijklmnopqrstuvwxyz0123456789"


def random_word(rng, lo=1, hi=12):
    return "".join(rng.choice(list(ALPHA[:12]), size=int(rng.integers(lo, hi))))


def test_levenshtein_known_values():
    assert levenshtein("abc", "abc") == 0
    assert levenshtein("abc", "abcd") == 1
    assert levenshtein("password", "Passw0rd") == 2
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("", "abc") == 3


def test_levenshtein_symmetric_fuzz():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b = random_word(rng), random_word(rng)
        assert levenshtein(a, b) == levenshtein(b, a)


def test_script_identity():
    assert min_edit_script("abc", "abc") == [END_OP]


def test_script_append():
    assert min_edit_script("abc", "abcd") == [EditOp(INS, 3, "d"), END_OP]


def test_script_two_replacements():
    ops = min_edit_script("password", "Passw0rd")
    assert ops == [EditOp(REP, 0, "P"), EditOp(REP, 5, "0"), END_OP]


def test_script_length_equals_distance_fuzz():
    rng = np.random.default_rng(1)
    for _ in range(2000):
        a, b = random_word(rng), random_word(rng)
        ops = min_edit_script(a, b)
        assert len(ops) - 1 == levenshtein(a, b)
        assert apply_edits(a, ops, max_len=64) == b


def test_apply_insert_at_tail():
    assert apply_edits("abc", [EditOp(INS, 3, "1"), END_OP]) == "abc1"


def test_apply_delete_front():
    assert apply_edits("abc", [EditOp(DEL, 0), END_OP]) == "bc"


def test_apply_positions_track_current_string():
    ops = [EditOp(DEL, 0), EditOp(INS, 2, "Z"), END_OP]
    # after del(0): "bcd"; ins at 2 -> "bcZd"
    assert apply_edits("abcd", ops) == "bcZd"


def test_apply_out_of_range_rejected():
    with pytest.raises(EditApplicationError):
        apply_edits("abc", [EditOp(DEL, 3), END_OP])
    with pytest.raises(EditApplicationError):
        apply_edits("abc", [EditOp(INS, 5, "x"), END_OP])


def test_apply_result_length_bounds():
    with pytest.raises(EditApplicationError):
        apply_edits("a", [EditOp(DEL, 0), END_OP])
    long_ops = [EditOp(INS, 0, "x") for _ in range(17)] + [END_OP]
    with pytest.raises(EditApplicationError):
        apply_edits("", long_ops)


def test_script_shape_validation():
    with pytest.raises(EditApplicationError):
        validate_script([EditOp(DEL, 0)])
    with pytest.raises(EditApplicationError):
        validate_script([END_OP, EditOp(DEL, 0), END_OP])


def test_op_constructor_validation():
    with pytest.raises(ValueError):
        EditOp("swap", 0)
    with pytest.raises(ValueError):
        EditOp(INS, 0)  # missing char
    with pytest.raises(ValueError):
        EditOp(DEL, 0, "x")


def test_op_space_round_trip():
    space = OpSpace(Alphabet("ab1"), max_len=4)
    for op_id in range(space.n_pred):
        assert space.encode(space.decode(op_id)) == op_id


def test_op_space_valid_ids():
    space = OpSpace(Alphabet("ab1"), max_len=4)
    valid2 = space.valid_ids(2)
    decoded = [space.decode(int(i)) for i in valid2]
    for op in decoded:
        if op.kind == INS:
            assert 0 <= op.pos <= 2
        else:
            assert 0 <= op.pos < 2
    # every in-range op is present: 2 del + 2*3 rep + 3*3 ins
    assert len(valid2) == 2 + 6 + 9


def test_round_trip_random_pairs_10k():
    rng = np.random.default_rng(2)
    for _ in range(10_000):
        a = random_word(rng, 1, 17)
        b = random_word(rng, 1, 17)
        ops = min_edit_script(a, b)
        assert apply_edits(a, ops) == b
        assert len(ops) - 1 == levenshtein(a, b)
