import numpy as np
import pytest

from planelift.groups import build_group
from planelift.reps import (
    Representation,
    conjugate,
    conjugate_pair_real_form,
    decompose,
    direct_sum,
    hom_dimension,
    irrep_table,
    regular_representation,
    tensor_product,
    trivial_representation,
    validate_representation,
)

OMEGA = np.exp(2j * np.pi / 3)


def test_z3_irreps_are_unit_characters():
    table = irrep_table(build_group("Z3"))
    assert [r.dim for r in table.irreps] == [1, 1, 1]
    gen = 1  # element g of the cyclic group
    vals = [r.matrices[gen, 0, 0] for r in table.irreps]
    assert np.isclose(vals[0], 1.0)
    assert np.isclose(vals[1], OMEGA)
    assert np.isclose(vals[2], np.conj(OMEGA))


def test_z2_characters():
    table = irrep_table(build_group("Z2"))
    chars = np.sort_complex(table.characters[:, 1])
    assert np.allclose(chars, [-1.0, 1.0])


def test_a4_irrep_dimensions_and_characters():
    a4 = build_group("A4")
    table = irrep_table(a4)
    assert sorted(r.dim for r in table.irreps) == [1, 1, 1, 3]
    flip_class = a4.class_of(a4.element_index("(1,2)(3,4)"))
    std_row = table.characters[[r.label for r in table.irreps].index("std3")]
    assert np.isclose(std_row[flip_class], -1.0)
    assert np.isclose(std_row[0], 3.0)


@pytest.mark.parametrize("name", ["Z3", "Z5", "A4", "A5"])
def test_irrep_tables_validate(name):
    group = build_group(name)
    table = irrep_table(group)
    assert sum(r.dim ** 2 for r in table.irreps) == group.order
    sizes = np.array([len(c) for c in group.conjugacy_classes])
    gram = (table.characters * sizes) @ table.characters.conj().T / group.order
    assert np.abs(gram - np.eye(len(table.irreps))).max() < 1e-12
    for rep in table.irreps:
        validate_representation(rep)


def test_irreps_unavailable_for_unnamed_groups():
    with pytest.raises(ValueError, match="irreps unavailable"):
        irrep_table(build_group("S4"))


def test_regular_representation_decompositions():
    z3 = build_group("Z3")
    dec = decompose(regular_representation(z3), irrep_table(z3))
    assert dec.multiplicities == {"chi0": 1, "chi1": 1, "chi2": 1}

    a4 = build_group("A4")
    dec = decompose(regular_representation(a4), irrep_table(a4))
    assert dec.multiplicities == {"triv": 1, "omega_plus": 1,
                                  "omega_minus": 1, "std3": 3}


def test_trivial_rep_decomposition():
    a4 = build_group("A4")
    dec = decompose(trivial_representation(a4), irrep_table(a4))
    assert dec.multiplicities == {"triv": 1}


def test_decompose_rejects_non_representation():
    a4 = build_group("A4")
    table = irrep_table(a4)
    rng = np.random.default_rng(0)
    noise = regular_representation(a4).matrices + 0.05 * rng.normal(size=(12, 12, 12))
    broken = Representation(a4, noise, "broken")
    with pytest.raises(ValueError, match="non-representation or numerical failure"):
        decompose(broken, table)


def test_direct_sum_and_tensor_dimensions():
    a4 = build_group("A4")
    table = irrep_table(a4)
    std = table.by_label("std3")
    two = direct_sum(table.by_label("omega_plus"), table.by_label("omega_minus"))
    assert direct_sum(two, std).dim == 5
    assert tensor_product(std, std).dim == 9


def test_tensor_of_conjugate_characters():
    z3 = build_group("Z3")
    table = irrep_table(z3)
    chi1 = table.by_label("chi1")
    sq = tensor_product(chi1, chi1)
    dec = decompose(sq, table)
    assert dec.multiplicities == {"chi2": 1}  # omega_plus squared is omega_minus


def test_tensor_with_trivial_is_identity_on_decompositions():
    a4 = build_group("A4")
    table = irrep_table(a4)
    std = table.by_label("std3")
    dec = decompose(tensor_product(std, trivial_representation(a4)), table)
    assert dec.multiplicities == {"std3": 1}


def test_tensor_character_is_pointwise_product():
    a4 = build_group("A4")
    table = irrep_table(a4)
    a = table.by_label("std3")
    b = table.by_label("omega_plus")
    prod = tensor_product(a, b)
    assert np.abs(prod.character() - a.character() * b.character()).max() < 1e-12


def test_hom_dimensions():
    a4 = build_group("A4")
    table = irrep_table(a4)
    std = table.by_label("std3")
    assert hom_dimension(std, std, table) == 1  # Schur for an irrep
    assert hom_dimension(regular_representation(a4), std, table) == 3
    assert hom_dimension(table.by_label("omega_plus"),
                         table.by_label("omega_minus"), table) == 0


def test_decompose_adds_over_direct_sums():
    a4 = build_group("A4")
    table = irrep_table(a4)
    rng = np.random.default_rng(1)
    labels = [r.label for r in table.irreps]
    picks = rng.choice(labels, size=4).tolist()
    rep = table.by_label(picks[0])
    for lbl in picks[1:]:
        rep = direct_sum(rep, table.by_label(lbl))
    dec = decompose(rep, table)
    expected: dict[str, int] = {}
    for lbl in picks:
        expected[lbl] = expected.get(lbl, 0) + 1
    assert dec.multiplicities == expected


def test_homomorphism_property_random_products():
    a5 = build_group("A5")
    table = irrep_table(a5)
    rng = np.random.default_rng(2)
    rep = table.by_label("icosa3a")
    for _ in range(200):
        a, b = rng.integers(0, a5.order, size=2)
        err = np.abs(rep.matrices[a] @ rep.matrices[b]
                     - rep.matrices[a5.mul[a, b]]).max()
        assert err < 1e-10


def test_conjugate_pair_real_form():
    z3 = build_group("Z3")
    table = irrep_table(z3)
    real = conjugate_pair_real_form(table.by_label("chi1"))
    validate_representation(real)
    g = real.matrices[1]
    assert np.abs(g.imag).max() == 0.0
    c, s = np.cos(2 * np.pi / 3), np.sin(2 * np.pi / 3)
    assert np.allclose(g.real, [[c, -s], [s, c]])


def test_conjugate_representation():
    z3 = build_group("Z3")
    table = irrep_table(z3)
    dec = decompose(conjugate(table.by_label("chi1")), table)
    assert dec.multiplicities == {"chi2": 1}
