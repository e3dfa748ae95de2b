mod support;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use factfeel::parser::Parser;
use factfeel::templates::{instantiate, TemplateForm};

#[test]
fn instantiate_matches_brute_force_on_random_sentences() {
    let parser = Parser::default();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut forms = BTreeSet::new();
    for _ in 0..3000 {
        let parsed = parser.chunk(support::random_sentence(&mut rng));
        let got = instantiate(&parsed);
        let want = support::reference_instances(parser.lexicon(), &parsed);
        assert_eq!(got, want, "\n{parsed}");
        forms.extend(got.iter().map(|p| p.form));
    }
    // the generator reaches nearly every template
    let missing: Vec<TemplateForm> = TemplateForm::ALL.iter().copied().filter(|f| !forms.contains(f)).collect();
    assert!(missing.len() <= 2, "never matched: {missing:?}");
}
