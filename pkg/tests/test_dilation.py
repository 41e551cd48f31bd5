import numpy as np
import pytest

from cpfix.errors import CoInvarianceViolated, NotUnitary, SemigroupLawViolated, ShapeMismatch
from cpfix.matcore import is_psd, op_norm, random_unitary
from cpfix.vnalg import (
    AlgebraElement,
    BlockStructure,
    CornerEmbedding,
    identity_element,
)
from cpfix.cpsemi import (
    apply,
    apply_power,
    conjugation_map,
    identity_map,
    make_family,
    to_superoperator,
)
from cpfix.dilation import (
    Minimality,
    block_zero_projection,
    build_random_instance,
    build_tail_shift,
    check_coinvariance,
    check_minimality,
    compress_semigroup,
    make_instance,
    tail_shift_map,
)
from cpfix.fixpoint import fixed_space

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_coinvariance_full_projection():
    st = BlockStructure((2, 2))
    alpha = make_family([identity_map(st)], expect_endomorphic=True)
    assert check_coinvariance(alpha, identity_element(st))


def test_coinvariance_tail_shift():
    shift = tail_shift_map(2, 2, PAULI_X)
    alpha = make_family([shift], expect_endomorphic=True)
    p = block_zero_projection(shift.source)
    assert check_coinvariance(alpha, p)
    # blockwise: alpha(1-p) = (0, 0, 1) <= (0, 1, 1)
    q = identity_element(shift.source) - p
    img = apply(shift, q)
    assert img.blocks[0].max() == 0.0 and img.blocks[1].max() == 0.0


def test_coinvariance_fails_generically():
    rng = np.random.default_rng(0)
    st = BlockStructure((2,))
    u = random_unitary(rng, 2)
    alpha = make_family([conjugation_map(st, [u])], expect_endomorphic=True)
    p = AlgebraElement(st, (np.diag([1.0, 0.0]).astype(complex),))
    # a generic unitary rotates the range of 1-p off itself
    assert not check_coinvariance(alpha, p)


def test_minimality_full_projection():
    st = BlockStructure((2,))
    alpha = make_family([identity_map(st)], expect_endomorphic=True)
    res = check_minimality(alpha, identity_element(st))
    assert res.status is Minimality.MINIMAL and res.steps == 0


def test_minimality_tail_shift_exact():
    inst = build_tail_shift(2, 2, PAULI_X)
    res = check_minimality(inst.alpha, inst.p)
    assert res.status is Minimality.MINIMAL
    assert res.steps <= 2
    assert res.final_defect_norm == 0.0


def test_minimality_identity_control():
    st = BlockStructure((2, 2))
    alpha = make_family([identity_map(st)], expect_endomorphic=True)
    p = AlgebraElement(st, (np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex)))
    res = check_minimality(alpha, p)
    assert res.status is Minimality.NON_MINIMAL
    q = identity_element(st) - p
    assert (res.limit - q).norm() == 0.0


def test_minimality_requires_coinvariance():
    rng = np.random.default_rng(1)
    st = BlockStructure((2,))
    alpha = make_family([conjugation_map(st, [random_unitary(rng, 2)])], expect_endomorphic=True)
    p = AlgebraElement(st, (np.diag([1.0, 0.0]).astype(complex),))
    with pytest.raises(CoInvarianceViolated):
        check_minimality(alpha, p)


def test_minimality_monotone_defects():
    from cpfix.cpsemi import diag_step

    for seed in (42, 43):
        inst = build_random_instance(seed, n_max=3, m_max=4, d=1 + seed % 2)
        prev = identity_element(inst.structure) - inst.p
        for _ in range(5):
            nxt = diag_step(inst.alpha, prev)
            assert all(is_psd(b, 1e-9) for b in (prev - nxt).blocks)
            prev = nxt


def test_compress_full_projection_is_identity_compression():
    inst_st = BlockStructure((2, 2))
    u = random_unitary(np.random.default_rng(2), 2)
    alpha = make_family([conjugation_map(inst_st, [u, u])], expect_endomorphic=True)
    emb, phi = compress_semigroup(alpha, identity_element(inst_st))
    assert op_norm(
        to_superoperator(phi.generators[0]).matrix - to_superoperator(alpha.generators[0]).matrix
    ) < 1e-12


def test_compress_tail_shift_gives_conjugation():
    u = random_unitary(np.random.default_rng(3), 2)
    inst = build_tail_shift(2, 3, u)
    corner_st = inst.emb.corner
    direct = conjugation_map(corner_st, [u])
    gap = op_norm(
        to_superoperator(inst.phi.generators[0]).matrix - to_superoperator(direct).matrix
    )
    assert gap <= 1e-10


def test_compress_single_kraus_contraction():
    u = random_unitary(np.random.default_rng(4), 2)
    inst = build_tail_shift(2, 1, u)
    ops = inst.phi.generators[0].ops(0, 0)
    assert len(ops) == 1
    assert op_norm(ops[0]) <= 1.0 + 1e-12


def test_semigroup_law_alarm_on_corrupt_embedding():
    # a non-isometric "embedding" destroys multiplicativity of corners
    shift = tail_shift_map(2, 2, PAULI_X)
    alpha = make_family([shift], expect_endomorphic=True)
    p = block_zero_projection(shift.source)
    v = np.diag([1.0, 0.5]).astype(complex)
    bad = CornerEmbedding(
        shift.source,
        BlockStructure((2,)),
        p,
        (v,),
        (0,),
    )
    with pytest.raises(SemigroupLawViolated):
        compress_semigroup(alpha, p, emb=bad)


def test_compress_requires_coinvariance():
    rng = np.random.default_rng(5)
    st = BlockStructure((2,))
    alpha = make_family([conjugation_map(st, [random_unitary(rng, 2)])], expect_endomorphic=True)
    p = AlgebraElement(st, (np.diag([1.0, 0.0]).astype(complex),))
    with pytest.raises(CoInvarianceViolated):
        compress_semigroup(alpha, p)


def test_build_tail_shift_scalar():
    inst = build_tail_shift(1, 1, np.array([[1.0]], dtype=complex))
    assert inst.structure.block_dims == (1, 1)
    assert fixed_space(inst.alpha).dimension == 1  # constants (c, c)
    assert fixed_space(inst.phi).dimension == 1


def test_build_tail_shift_pauli_dims():
    inst = build_tail_shift(2, 2, PAULI_X)
    # commutant of X is span{1, X}
    assert fixed_space(inst.alpha).dimension == 2
    assert fixed_space(inst.phi).dimension == 2


def test_build_tail_shift_rotation_dims():
    u = np.diag([1.0, np.exp(1j * np.pi / 3)])
    inst = build_tail_shift(2, 2, u)
    assert fixed_space(inst.phi).dimension == 2  # diagonal matrices


def test_build_tail_shift_rejects_nonunitary():
    with pytest.raises(NotUnitary):
        build_tail_shift(2, 2, np.array([[1.0, 0.0], [0.0, 0.5]]))
    with pytest.raises(NotUnitary):
        build_tail_shift(2, 2, np.eye(3))


def test_build_random_instance_deterministic():
    a = build_random_instance(17, n_max=3, m_max=4, d=2)
    b = build_random_instance(17, n_max=3, m_max=4, d=2)
    assert a.structure == b.structure
    for ga, gb in zip(a.alpha.generators, b.alpha.generators):
        assert op_norm(to_superoperator(ga).matrix - to_superoperator(gb).matrix) == 0.0


def test_build_random_instance_bounds():
    with pytest.raises(ShapeMismatch):
        build_random_instance(0, n_max=9)
    with pytest.raises(ShapeMismatch):
        build_random_instance(0, d=3)


@pytest.mark.parametrize("seed", range(30))
def test_build_random_instance_properties(seed):
    inst = build_random_instance(seed, n_max=3, m_max=4, d=1 + seed % 2)
    assert check_coinvariance(inst.alpha, inst.p)
    res = check_minimality(inst.alpha, inst.p)
    assert res.status is Minimality.MINIMAL
    # composite co-invariance for every multi-index with |s| <= 4
    q = identity_element(inst.structure) - inst.p
    d = inst.alpha.rank
    indices = [(a,) for a in range(1, 5)] if d == 1 else [
        (a, b) for a in range(5) for b in range(5) if 1 <= a + b <= 4
    ]
    for s in indices:
        img = apply_power(inst.alpha, s, q)
        assert all(is_psd(b, 1e-9) for b in (q - img).blocks)


def test_make_instance_rejects_cp_only_family():
    from cpfix.cpsemi import damping_family

    fam = damping_family(0.5)
    with pytest.raises(ShapeMismatch):
        make_instance(fam, identity_element(fam.structure))
