from fractions import Fraction

import pytest

from cellsheaf import (
    DocumentError,
    FunctorialityError,
    Matrix,
    NotAntisymmetricError,
    PrimeField,
    QQ,
    parse_document,
    parse_text,
    realize,
    render_document,
)

from helpers import FIXTURES


def load(name):
    return (FIXTURES / name).read_text()


class TestParse:
    def test_square_fixture(self):
        realized = parse_text(load("square.sheaf"))
        sheaf = realized.sheaves["main"]
        assert sheaf.dims == {"p": 2, "q1": 1, "q2": 1, "r": 1}
        assert sheaf.field == QQ
        assert realized.opens["U"].members == {"q1", "q2", "r"}
        assert sheaf.restriction("p", "r") == Matrix.build(QQ, [[6, 6]])

    def test_all_shipped_fixtures_parse(self):
        for name in ["square", "span", "double_target", "fan"]:
            realized = parse_text(load(f"{name}.sheaf"))
            assert "main" in realized.sheaves
            assert "U" in realized.opens

    def test_rational_entries(self):
        realized = parse_text(
            "[poset]\nelements = a b\nrelation = a<b\n"
            "[sheaf]\ndim a = 1\ndim b = 1\nmap a->b = [[-2/3]]\n"
        )
        m = realized.sheaves["main"].restriction("a", "b")
        assert m.data[0][0] == Fraction(-2, 3)

    def test_id_and_zero_shorthands(self):
        realized = parse_text(
            "[poset]\nelements = a b c\nrelation = a<b b<c\n"
            "[sheaf]\ndim a = 2\ndim b = 2\ndim c = 2\n"
            "map a->b = id\nmap b->c = zero\n"
        )
        sheaf = realized.sheaves["main"]
        assert sheaf.restriction("a", "b") == Matrix.identity(QQ, 2)
        assert sheaf.restriction("a", "c") == Matrix.zeros(QQ, 2, 2)

    def test_comments_and_blank_lines(self):
        realized = parse_text(
            "# heading\n\n[poset]  \nelements = a   # trailing\n[sheaf]\ndim a = 1\n"
        )
        assert realized.sheaves["main"].dim("a") == 1


class TestParseErrors:
    def test_unknown_key_carries_line(self):
        text = "[poset]\nelements = a\nbogus = 1\n"
        with pytest.raises(DocumentError) as err:
            parse_document(text)
        assert err.value.line == 3

    def test_content_before_block(self):
        with pytest.raises(DocumentError):
            parse_document("elements = a\n")

    def test_malformed_matrix(self):
        with pytest.raises(DocumentError):
            parse_text(
                "[poset]\nelements = a b\nrelation = a<b\n"
                "[sheaf]\ndim a = 1\ndim b = 1\nmap a->b = [[x]]\n"
            )

    def test_matrix_shape_mismatch_is_a_document_error_with_line(self):
        text = (
            "[poset]\nelements = a b\nrelation = a<b\n"
            "[sheaf]\ndim a = 2\ndim b = 1\nmap a->b = [[1]]\n"
        )
        with pytest.raises(DocumentError) as err:
            parse_text(text)
        assert err.value.line == 7

    def test_missing_dimension(self):
        with pytest.raises(DocumentError):
            parse_text("[poset]\nelements = a b\nrelation = a<b\n[sheaf]\ndim a = 1\n")

    def test_missing_map(self):
        with pytest.raises(DocumentError):
            parse_text(
                "[poset]\nelements = a b\nrelation = a<b\n"
                "[sheaf]\ndim a = 1\ndim b = 1\n"
            )

    def test_map_for_non_covering_pair(self):
        with pytest.raises(DocumentError):
            parse_text(
                "[poset]\nelements = a b c\nrelation = a<b b<c\n"
                "[sheaf]\ndim a = 1\ndim b = 1\ndim c = 1\n"
                "map a->b = [[1]]\nmap b->c = [[1]]\nmap a->c = [[1]]\n"
            )

    def test_duplicate_poset_block(self):
        with pytest.raises(DocumentError):
            parse_document("[poset]\nelements = a\n[poset]\nelements = b\n")

    def test_duplicate_named_blocks(self):
        with pytest.raises(DocumentError):
            parse_document(
                "[poset]\nelements = a\n[open U]\nmembers = a\n[open U]\nmembers = a\n"
            )
        with pytest.raises(DocumentError):
            parse_document(
                "[poset]\nelements = a\n[sheaf]\ndim a = 1\n[sheaf]\ndim a = 1\n"
            )

    def test_duplicate_dim_and_map_keys(self):
        with pytest.raises(DocumentError):
            parse_document("[poset]\nelements = a\n[sheaf]\ndim a = 1\ndim a = 2\n")
        with pytest.raises(DocumentError):
            parse_document(
                "[poset]\nelements = a b\nrelation = a<b\n"
                "[sheaf]\ndim a = 1\ndim b = 1\nmap a->b = [[1]]\nmap a->b = [[2]]\n"
            )

    def test_open_needs_exactly_one_of_stars_or_members(self):
        with pytest.raises(DocumentError):
            parse_text("[poset]\nelements = a\n[sheaf]\ndim a = 1\n[open U]\n")

    def test_unknown_element_in_morphism_map(self):
        with pytest.raises(DocumentError) as err:
            parse_document(
                "[poset]\nelements = a\n[sheaf]\ndim a = 1\n"
                "[morphism f]\nmap a = [[1]]\nmap zz = [[1]]\n"
            )
        assert err.value.line == 7

    def test_unknown_sheaf_in_morphism(self):
        with pytest.raises(DocumentError):
            parse_text(
                "[poset]\nelements = a\n[sheaf]\ndim a = 1\n"
                "[morphism f]\nsource = ghost\nmap a = [[1]]\n"
            )

    def test_id_requires_square(self):
        with pytest.raises(DocumentError):
            parse_text(
                "[poset]\nelements = a b\nrelation = a<b\n"
                "[sheaf]\ndim a = 2\ndim b = 1\nmap a->b = id\n"
            )

    def test_bad_field_name(self):
        with pytest.raises(DocumentError):
            parse_text("[poset]\nelements = a\n[sheaf]\nfield = r\ndim a = 1\n")


class TestSemanticFailures:
    def test_non_antisymmetric_relation_is_a_validation_error(self):
        doc = parse_document(
            "[poset]\nelements = a b\nrelation = a<b b<a\n[sheaf]\ndim a = 1\ndim b = 1\nmap a->b = [[1]]\n"
        )
        with pytest.raises(NotAntisymmetricError):
            realize(doc)

    def test_path_dependent_fixture_reports_pair(self):
        with pytest.raises(FunctorialityError) as err:
            parse_text(load("bad_square.sheaf"))
        assert (err.value.low, err.value.high) == ("p", "r")


class TestFieldOverride:
    def test_override_to_prime_field(self):
        realized = parse_text(load("square.sheaf"), field_override="fp:5")
        sheaf = realized.sheaves["main"]
        assert sheaf.field == PrimeField(5)
        # 6 = 1 mod 5
        assert sheaf.restriction("p", "r") == Matrix.build(PrimeField(5), [[1, 1]])


class TestRender:
    def test_roundtrip_on_fixtures(self):
        for name in ["square", "span", "double_target", "fan"]:
            realized = parse_text(load(f"{name}.sheaf"))
            again = parse_text(render_document(realized))
            assert again.poset == realized.poset
            assert again.sheaves == realized.sheaves
            assert {k: v.members for k, v in again.opens.items()} == {
                k: v.members for k, v in realized.opens.items()
            }

    def test_roundtrip_with_morphism_and_prime_field(self):
        text = (
            "[poset]\nelements = a b\nrelation = a<b\n"
            "[sheaf]\nfield = fp:7\ndim a = 1\ndim b = 1\nmap a->b = [[3]]\n"
            "[sheaf other]\nfield = fp:7\ndim a = 1\ndim b = 1\nmap a->b = [[3]]\n"
            "[morphism f]\nsource = main\ntarget = other\nmap a = [[2]]\nmap b = [[2]]\n"
        )
        realized = parse_text(text)
        again = parse_text(render_document(realized))
        assert again.sheaves == realized.sheaves
        assert again.morphisms["f"].components == realized.morphisms["f"].components

    def test_rendering_is_stable(self):
        realized = parse_text(load("square.sheaf"))
        text = render_document(realized)
        assert render_document(parse_text(text)) == text
