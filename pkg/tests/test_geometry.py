import itertools
import random
from fractions import Fraction

import pytest

from pengeom.exact import RationalMatrix, dot, rat, vec
from pengeom.geometry import (
    CapExceeded,
    SignedPermutation,
    enumerate_exposed_faces,
    enumerate_models,
    face_intersects_rowspace,
    hull_face,
    is_model,
    model_of,
    model_to_face,
    sign_to_crosspolytope_face,
    sign_to_cube_face,
    sign_vectors,
    signed_permutations,
)

W2 = (Fraction(7, 2), Fraction(3, 2))  # 3.5, 1.5


def test_model_of_examples():
    x = vec(["3.1", "-1.2", "0", "-3.1"])
    assert model_of(x) == (2, -1, 0, -2)
    assert model_of(vec([0, 0])) == (0, 0)
    assert model_of(vec(["0.5", "0.5", "-0.5"])) == (1, 1, -1)


def test_model_of_tolerance():
    assert model_of((1.0, 1.0 + 1e-9, -2.0, 1e-12), tol=1e-6) == (1, 1, -2, 0)
    assert model_of((1.0, 1.1), tol=1e-6) == (1, 2)


def test_is_model():
    assert is_model((2, -1, 0, -2))
    assert is_model((0, 0))
    assert not is_model((2, 0))  # level 1 missing
    assert not is_model((1, True))
    assert is_model((1, -1))


def test_model_of_is_idempotent_on_models():
    for m in enumerate_models(3):
        assert model_of(m) == m
        assert is_model(m)


M2_EXPECTED = {
    (0, 0),
    (1, 0), (-1, 0), (0, 1), (0, -1),
    (1, 1), (1, -1), (-1, 1), (-1, -1),
    (2, 1), (-2, 1), (2, -1), (-2, -1),
    (1, 2), (-1, 2), (1, -2), (-1, -2),
}


def test_enumerate_models_p2():
    models = enumerate_models(2)
    assert len(models) == 17
    assert set(models) == M2_EXPECTED


def test_enumerate_models_small_counts():
    assert enumerate_models(1) == [(0,), (-1,), (1,)]
    assert len(enumerate_models(3)) == 147
    assert len(enumerate_models(4)) == 1697
    # no duplicates, all valid
    ms = enumerate_models(4)
    assert len(set(ms)) == len(ms)
    assert all(is_model(m) for m in ms)


def test_enumeration_caps():
    with pytest.raises(CapExceeded):
        enumerate_models(7)
    with pytest.raises(CapExceeded):
        sign_vectors(11)
    assert len(list(sign_vectors(2))) == 9
    assert next(iter(sign_vectors(2))) == (1, 1)


def test_signed_permutation_roundtrips():
    rng = random.Random(5)
    for _ in range(50):
        p = rng.randint(1, 5)
        perm = list(range(p))
        rng.shuffle(perm)
        g = SignedPermutation(tuple(rng.choice((1, -1)) for _ in range(p)), tuple(perm))
        x = vec([Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(p)])
        y = vec([Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(p)])
        assert g.invert().apply(g.apply(x)) == x
        assert g.compose(g.invert()).apply(x) == x
        # orthogonality
        assert dot(g.apply(x), g.apply(y)) == dot(x, y)
        assert sorted(abs(v) for v in g.apply(x)) == sorted(abs(v) for v in x)


def test_sorting_map():
    x = vec(["3.1", "-1.2", "0", "-3.1"])
    g = SignedPermutation.sorting(x)
    assert g.apply(x) == vec(["3.1", "3.1", "1.2", "0"])


def test_model_equivariance():
    rng = random.Random(9)
    for _ in range(60):
        p = rng.randint(1, 4)
        x = vec([Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(p)])
        perm = list(range(p))
        rng.shuffle(perm)
        g = SignedPermutation(tuple(rng.choice((1, -1)) for _ in range(p)), tuple(perm))
        assert model_of(g.apply(x)) == g.apply(model_of(x))


def test_face_table_for_two_weights():
    f0 = model_to_face((0, 0), W2)
    assert f0.codim == 0 and f0.vertex_count() == 8
    f10 = model_to_face((1, 0), W2)
    assert f10.codim == 1
    assert set(f10.vertices()) == {vec(["3.5", "1.5"]), vec(["3.5", "-1.5"])}
    f11 = model_to_face((1, 1), W2)
    assert f11.codim == 1
    assert set(f11.vertices()) == {vec(["3.5", "1.5"]), vec(["1.5", "3.5"])}
    f21 = model_to_face((2, 1), W2)
    assert f21.codim == 2
    assert f21.vertices() == (vec(["3.5", "1.5"]),)


def test_model_to_face_validation():
    with pytest.raises(ValueError):
        model_to_face((2, 0), W2)
    with pytest.raises(ValueError):
        model_to_face((1, 0), (Fraction(1), Fraction(1)))  # tied weights
    with pytest.raises(ValueError):
        model_to_face((1, 0), (Fraction(2), Fraction(0)))  # zero weight
    with pytest.raises(ValueError):
        model_to_face((1, 0, 1), W2)


def test_codim_law():
    w = (Fraction(5), Fraction(3), Fraction(1))
    for m in enumerate_models(3):
        f = model_to_face(m, w)
        assert f.codim == max(abs(v) for v in m)
        # codim is also the ambient dim minus the affine dimension
        assert hull_face(f.vertices()).codim == f.codim


def test_face_equivariance():
    rng = random.Random(21)
    w = (Fraction(9, 2), Fraction(2), Fraction(1, 2))
    models = enumerate_models(3)
    for _ in range(25):
        m = models[rng.randrange(len(models))]
        perm = list(range(3))
        rng.shuffle(perm)
        g = SignedPermutation(tuple(rng.choice((1, -1)) for _ in range(3)), tuple(perm))
        gm = g.apply(m)
        lhs = set(model_to_face(gm, w).vertices())
        rhs = {g.apply(v) for v in model_to_face(m, w).vertices()}
        assert lhs == rhs


def test_cube_and_crosspolytope_faces():
    f = sign_to_cube_face((1, 0, -1), scale=2)
    assert f.codim == 2 and f.vertex_count() == 2
    assert set(f.vertices()) == {(2, -2, -2), (2, 2, -2)}
    full = sign_to_cube_face((0, 0), scale=1)
    assert full.codim == 0 and full.contains_zero()

    c = sign_to_crosspolytope_face((1, 0, 0))
    assert c.codim == 3 and c.vertices() == ((1, 0, 0),)
    e = sign_to_crosspolytope_face((1, -1, 0))
    assert e.codim == 2 and set(e.vertices()) == {(1, 0, 0), (0, -1, 0)}
    whole = sign_to_crosspolytope_face((0, 0))
    assert whole.codim == 0 and whole.vertex_count() == 4

    with pytest.raises(ValueError):
        sign_to_cube_face((2, 0))


def test_vertex_cap():
    f = model_to_face((0, 0, 0), (Fraction(5), Fraction(3), Fraction(1)))
    assert f.vertex_count() == 48
    with pytest.raises(CapExceeded):
        f.vertices(cap=10)


def test_face_intersects_rowspace_segment():
    X = RationalMatrix.from_rows([[1, 0]])
    f = model_to_face((1, 0), W2)
    hit = face_intersects_rowspace(f, X)
    assert hit is not None
    assert hit.point == (Fraction(7, 2), 0)
    assert X.rmatvec(hit.z) == hit.point

    X2 = RationalMatrix.from_rows([[1, 1]])
    assert face_intersects_rowspace(f, X2) is None


def test_face_intersects_rowspace_full_ball():
    X = RationalMatrix.from_rows([[1, 1]])
    f = model_to_face((0, 0), W2)
    hit = face_intersects_rowspace(f, X)
    assert hit is not None and hit.point == (0, 0) and hit.z == (0,)


def test_face_intersects_rowspace_vertex():
    X = RationalMatrix.from_rows([[7, 3]])
    f = model_to_face((2, 1), W2)  # vertex (3.5, 1.5) = (7, 3)/2
    hit = face_intersects_rowspace(f, X)
    assert hit is not None and hit.point == (Fraction(7, 2), Fraction(3, 2))
    X2 = RationalMatrix.from_rows([[1, 0]])
    assert face_intersects_rowspace(f, X2) is None


def test_face_intersects_rowspace_full_rank():
    # rank p: the row space is everything, any face meets it
    X = RationalMatrix.from_rows([[1, 0], [0, 1]])
    f = model_to_face((2, 1), W2)
    hit = face_intersects_rowspace(f, X)
    assert hit is not None and hit.point == (Fraction(7, 2), Fraction(3, 2))


def test_hull_face_codims():
    v = vec([1, 2, 3])
    assert hull_face([v]).codim == 3
    assert hull_face([(0, 0, 1), (0, 1, 0)]).codim == 2


def _faces_as_vertex_sets(faces):
    return {frozenset(f.vertices()) for f in faces}


def test_exposed_face_enumeration_matches_model_faces_p2():
    verts = model_to_face((0, 0), W2).vertices()
    brute = enumerate_exposed_faces(verts)
    assert len(brute) == 17
    structured = {frozenset(model_to_face(m, W2).vertices()) for m in enumerate_models(2)}
    assert _faces_as_vertex_sets(brute) == structured
    # codims agree face by face
    codim_of = {frozenset(model_to_face(m, W2).vertices()): model_to_face(m, W2).codim
                for m in enumerate_models(2)}
    for f in brute:
        assert f.codim == codim_of[frozenset(f.hull)]


def test_exposed_face_enumeration_cube_and_crosspolytope():
    square = sign_to_cube_face((0, 0), scale=1).vertices()
    faces = enumerate_exposed_faces(square)
    assert len(faces) == 9  # 4 vertices + 4 edges + the square
    cp = sign_to_crosspolytope_face((0, 0, 0)).vertices()
    faces = enumerate_exposed_faces(cp)
    # 6 vertices + 12 edges + 8 facets + full = 27 = all nonzero sign vectors + 1
    assert len(faces) == 27


def test_exposed_face_enumeration_guards():
    with pytest.raises(CapExceeded):
        enumerate_exposed_faces([tuple([Fraction(i == j) for i in range(5)]) for j in range(5)])
    with pytest.raises(ValueError):
        enumerate_exposed_faces([(Fraction(1), Fraction(0)), (Fraction(2), Fraction(0))])


def test_signed_permutation_count():
    assert sum(1 for _ in signed_permutations(3)) == 48


def test_face_json_dict():
    f = model_to_face((1, 0), W2)
    d = f.to_json_dict()
    assert d["kind"] == "signperm" and d["codim"] == 1 and d["model"] == [1, 0]
    assert d["blocks"][0]["weights"] == ["7/2"]
    d2 = f.to_json_dict(include_vertices=True)
    assert ["7/2", "3/2"] in d2["vertices"]
