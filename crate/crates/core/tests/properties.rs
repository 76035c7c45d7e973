mod common;
mod props;

#[test]
fn d_squared_is_zero() {
    props::d_squared_is_zero(props::CASES).unwrap();
}

#[test]
fn wedge_is_graded_commutative() {
    props::wedge_is_graded_commutative(props::CASES).unwrap();
}

#[test]
fn d_obeys_leibniz() {
    props::d_obeys_leibniz(props::CASES).unwrap();
}

#[test]
fn polar_ranks_increase_along_any_flag() {
    props::polar_ranks_increase_along_any_flag(props::CASES).unwrap();
}

#[test]
fn characters_do_not_depend_on_the_basis() {
    props::characters_do_not_depend_on_the_basis(props::CASES).unwrap();
}

#[test]
fn polar_kernel_is_exactly_the_extending_vectors() {
    props::polar_kernel_is_exactly_the_extending_vectors(props::CASES).unwrap();
}

#[test]
fn printing_and_reparsing_is_the_identity() {
    props::printing_and_reparsing_is_the_identity(props::CASES).unwrap();
}

#[test]
fn canonical_form_agrees_with_evaluation() {
    props::canonical_form_agrees_with_evaluation(props::CASES).unwrap();
}

#[test]
fn zero_test_agrees_with_random_points() {
    props::zero_test_agrees_with_random_points(props::CASES).unwrap();
}
