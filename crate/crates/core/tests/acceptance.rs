//! One pass/fail line per acceptance criterion.

use prodcoh::acceptance;

#[test]
fn acceptance() {
    println!();
    let mut failed = Vec::new();
    for id in 1..=acceptance::count() {
        let check = acceptance::run(id);
        println!("{check}");
        if !check.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
