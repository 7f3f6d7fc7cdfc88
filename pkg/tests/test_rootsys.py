import pytest

from qgb.coeff import R, S
from qgb.rootsys import (RootSystemError, group_pairing, kostant_partitions, positive_roots, root_system,
                         structural_constant, two_rho)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_root_counts(n):
    assert len(positive_roots(n)) == n * n
    assert len(root_system("A", n).roots) == n * (n + 1) // 2
    assert len({r.degree for r in positive_roots(n)}) == n * n


@pytest.mark.parametrize("cartan,n", [("B", 2), ("B", 3), ("B", 4), ("A", 3), ("A", 4)])
def test_order_is_convex(cartan, n):
    system = root_system(cartan, n)
    pos = system.by_degree
    for a, ra in enumerate(system.roots):
        for b in range(a + 1, len(system.roots)):
            total = tuple(x + y for x, y in zip(ra.degree, system.roots[b].degree))
            if total in pos:
                assert a < pos[total] < b


@pytest.mark.parametrize("cartan,n", [("B", 2), ("B", 4), ("A", 3)])
def test_brackets_add_degrees(cartan, n):
    system = root_system(cartan, n)
    for br in system.brackets:
        if br is None:
            continue
        deg = tuple(x + y for x, y in zip(system.degree_of(br.left), system.degree_of(br.right)))
        assert deg == system.degree_of(br.root)
        assert br.twist == group_pairing(system, system.degree_of(br.left), system.degree_of(br.right)).inverse()


@pytest.mark.parametrize("cartan,n", [("B", 3), ("A", 3)])
def test_pairing_matrix_swap_symmetry(cartan, n):
    pm = root_system(cartan, n).pairing_matrix
    for i in range(n):
        for j in range(n):
            assert pm[i][j] == pm[j][i].swap_rs().inverse()


def test_structural_constants_rank_two():
    assert structural_constant(2, 1, 1) == R ** 2 * S ** -2
    assert structural_constant(2, 2, 2) == R / S
    assert structural_constant(2, 1, 2) == R ** -2
    assert structural_constant(2, 2, 1) == S ** 2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_two_rho_is_sum_of_roots(n):
    total = [0] * n
    for root in positive_roots(n):
        total = [a + b for a, b in zip(total, root.degree)]
    assert tuple(total) == two_rho(n)


def test_index_lookup_and_names():
    system = root_system("B", 3)
    assert system.name_of(system.index_of(1, 3, primed=True)) == "E(1,3')"
    assert system.name_of(system.simple(2), "F") == "f2"
    with pytest.raises(RootSystemError):
        system.index_of(3, 2)
    with pytest.raises(RootSystemError):
        root_system("B", 1)


def test_kostant_partitions_small():
    system = root_system("B", 2)
    assert len(kostant_partitions(system, (1, 1))) == 2
    assert len(kostant_partitions(system, (1, 2))) == 3
    assert kostant_partitions(system, (0, 0)) == [()]
