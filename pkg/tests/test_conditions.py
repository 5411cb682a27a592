"""Guard-expression parsing, printing, evaluation, and triviality."""

import random

import pytest

from tmkit.conditions import (
    And,
    LiteralFalse,
    LiteralTrue,
    Not,
    Or,
    Predicate,
    PredicateEnv,
    collect_predicates,
    evaluate,
    is_trivial,
    parse_condition,
    print_condition,
)
from tmkit.errors import ParseError, UnknownPredicate


def test_paper_guard_example():
    ast = parse_condition("stereochemistryAssigned(config) || noStereoPresent(config)")
    assert ast == Or(
        Predicate("stereochemistryAssigned", ("config",)),
        Predicate("noStereoPresent", ("config",)),
    )


def test_literals():
    assert parse_condition("true") == LiteralTrue()
    assert parse_condition("false") == LiteralFalse()


def test_precedence_hand_parse():
    # ! binds tighter than &&, which binds tighter than ||.
    ast = parse_condition("a(x) && !b(y) || c(z)")
    assert ast == Or(
        And(Predicate("a", ("x",)), Not(Predicate("b", ("y",)))),
        Predicate("c", ("z",)),
    )


def test_precedence_equivalences():
    assert parse_condition("a || b && c") == parse_condition("a || (b && c)")
    assert parse_condition("!a && b") == parse_condition("(!a) && b")


def test_left_associativity():
    assert parse_condition("a && b && c") == And(
        And(Predicate("a"), Predicate("b")), Predicate("c")
    )


def test_bare_identifier_is_zero_arg_predicate():
    assert parse_condition("ready") == Predicate("ready", ())
    assert parse_condition("ready()") == Predicate("ready", ())


@pytest.mark.parametrize(
    "text",
    ["(a || b", "a &&", "a || ", "a b", "a(,)", "&& a", "a(x,)", "a @ b", "", "  "],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_condition(text)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as err:
        parse_condition("a @ b")
    assert err.value.column == 3
    assert err.value.token == "@"


def test_print_zero_arg_bare():
    assert print_condition(Or(Predicate("a"), Predicate("b"))) == "a || b"


def test_print_forces_parens_under_not():
    assert print_condition(Not(Or(Predicate("a"), Predicate("b")))) == "!(a || b)"
    assert print_condition(Not(Not(Predicate("a")))) == "!!a"


def test_print_right_nested_keeps_shape():
    right_nested = Or(Predicate("a"), Or(Predicate("b"), Predicate("c")))
    text = print_condition(right_nested)
    assert text == "a || (b || c)"
    assert parse_condition(text) == right_nested


def test_paper_condition_round_trip():
    source = "stereochemistryAssigned(config) || noStereoPresent(config)"
    ast = parse_condition(source)
    assert parse_condition(print_condition(ast)) == ast


def random_ast(rng, depth):
    roll = rng.random()
    if depth <= 0 or roll < 0.35:
        choice = rng.random()
        if choice < 0.1:
            return LiteralTrue()
        if choice < 0.2:
            return LiteralFalse()
        name = rng.choice(["alpha", "beta", "gammaCheck", "delta_flag", "x9"])
        args = tuple(rng.choice(["u", "v", "w"]) for _ in range(rng.randint(0, 3)))
        return Predicate(name, args)
    if roll < 0.55:
        return Not(random_ast(rng, depth - 1))
    left = random_ast(rng, depth - 1)
    right = random_ast(rng, depth - 1)
    return And(left, right) if roll < 0.8 else Or(left, right)


def test_print_parse_round_trip_1000_random_asts():
    rng = random.Random(20240817)
    for _ in range(1000):
        ast = random_ast(rng, 6)
        printed = print_condition(ast)
        assert parse_condition(printed) == ast, printed


def test_evaluate_paper_condition():
    ast = parse_condition("stereochemistryAssigned(config) || noStereoPresent(config)")
    env = PredicateEnv.from_strings(
        {"stereochemistryAssigned(config)": True, "noStereoPresent(config)": False}
    )
    assert evaluate(ast, env) is True


def test_strict_unknown_predicate_raises():
    ast = parse_condition("a && b")
    env = PredicateEnv.from_strings({"a": True}, strict=True)
    with pytest.raises(UnknownPredicate):
        evaluate(ast, env)


def test_short_circuit_masks_unknown_predicate():
    ast = parse_condition("a && b")
    env = PredicateEnv.from_strings({"a": False}, strict=True)
    assert evaluate(ast, env) is False
    # Same on the || side.
    env_or = PredicateEnv.from_strings({"a": True}, strict=True)
    assert evaluate(parse_condition("a || b"), env_or) is True


def test_lenient_unknown_is_false():
    env = PredicateEnv(assignments={}, strict=False)
    assert evaluate(parse_condition("mystery(x)"), env) is False


def test_de_morgan_all_assignments():
    negated_and = parse_condition("!(a && b)")
    or_of_negations = parse_condition("!a || !b")
    for a in (False, True):
        for b in (False, True):
            env = PredicateEnv.from_strings({"a": a, "b": b})
            assert evaluate(negated_and, env) == evaluate(or_of_negations, env)


def test_is_trivial_literals_and_prefixes():
    assert is_trivial(parse_condition("true"))
    assert is_trivial(parse_condition("false"))
    assert is_trivial(parse_condition("exists(list)"))
    assert is_trivial(parse_condition("hasValue(x)"))
    assert is_trivial(parse_condition("isPresent(x)"))
    assert is_trivial(parse_condition("notNullRef(x)"))


def test_substantive_conditions_not_trivial():
    assert not is_trivial(
        parse_condition("stereochemistryAssigned(config) || noStereoPresent(config)")
    )
    assert not is_trivial(parse_condition("comparisonPending(x)"))
    # Operators make even existence checks non-trivial.
    assert not is_trivial(parse_condition("exists(a) && exists(b)"))


def test_trivial_prefixes_configurable():
    ast = parse_condition("checkDone(x)")
    assert not is_trivial(ast)
    assert is_trivial(ast, trivial_prefixes=("check",))


def test_is_trivial_whitespace_invariant():
    for dense, spaced in [
        ("exists(list)", "  exists( list )  "),
        ("a(x)&&b(y)", "a(x) && b(y)"),
        ("true", " true "),
    ]:
        assert is_trivial(parse_condition(dense)) == is_trivial(parse_condition(spaced))


def test_collect_predicates():
    ast = parse_condition("a(x) && (!b || a(x))")
    assert collect_predicates(ast) == {("a", ("x",)), ("b", ())}
