use super::*;
use crate::LabeledPost;

fn posts() -> Vec<LabeledPost> {
    vec![
        LabeledPost::new(
            "1",
            "Member",
            "I feel sad and tired today. Nothing helps.",
            None,
        ),
        LabeledPost::new(
            "2",
            "Moderator",
            "Glad you are here! Call samaritans if you need.",
            None,
        ),
        LabeledPost::new(
            "3",
            "Member",
            "I want to die. I have pills. http://example.com",
            None,
        ),
        LabeledPost::new("4", "Guest", "Work was good today, feeling happy.", None),
    ]
}

fn fit(preset: FeaturePreset) -> FeaturePipeline {
    FeaturePipeline::fit(&posts(), &preset.config(), FeatureResources::builtin()).unwrap()
}

#[test]
fn layout_is_tfidf_then_dense_then_rank() {
    let p = fit(FeaturePreset::Full);
    let names = p.column_names();
    assert_eq!(names.len(), p.dim());
    let first_dense = p.tfidf_width();
    assert!(names[..first_dense].iter().all(|n| n.starts_with("tfidf:")));
    assert!(names[first_dense].starts_with("lex:"));
    let tail: Vec<&str> = names[names.len() - 4..]
        .iter()
        .map(String::as_str)
        .collect();
    assert_eq!(
        tail,
        ["rank:Guest", "rank:Member", "rank:Moderator", "rank:OTHER"]
    );
    assert!(names.iter().any(|n| n == "pattern:self_harm"));
    assert!(names.iter().any(|n| n == "emb:last:3"));

    for v in p.transform(&posts()) {
        assert_eq!(v.dim(), p.dim());
        assert!(v.is_finite());
        assert!(v.sparse.iter().all(|&(c, _)| c < v.dense_offset));
        assert_eq!(&*v.fingerprint, p.fingerprint());
    }
}

#[test]
fn unknown_rank_goes_to_other() {
    let p = fit(FeaturePreset::Full);
    let v = p.transform_one(&LabeledPost::new("x", "Wizard", "hello", None));
    assert_eq!(*v.dense.last().unwrap(), 1.0);
    let ones = v.dense[v.dense.len() - 4..]
        .iter()
        .filter(|&&x| x == 1.0)
        .count();
    assert_eq!(ones, 1);
}

#[test]
fn only_lexicons_has_only_lexicon_columns() {
    let p = fit(FeaturePreset::OnlyLexicons);
    assert_eq!(p.tfidf_width(), 0);
    assert!(p.dense_names().iter().all(|n| n.starts_with("lex")));
}

#[test]
fn fingerprint_is_deterministic_and_config_sensitive() {
    let a = fit(FeaturePreset::Full);
    let b = fit(FeaturePreset::Full);
    assert_eq!(a.fingerprint(), b.fingerprint());
    assert_ne!(
        a.fingerprint(),
        fit(FeaturePreset::FullHeuristics).fingerprint()
    );
    assert_ne!(
        fit(FeaturePreset::OnlyLexicons).fingerprint(),
        fit(FeaturePreset::LexiconsNegation).fingerprint()
    );

    let mut other_embeddings = FeatureResources::builtin();
    other_embeddings.embeddings = Some(std::sync::Arc::new(
        EmbeddingTable::from_pairs([("sad", vec![1.0, 0.0, 0.0, 0.0])]).unwrap(),
    ));
    let rebound = FeaturePipeline::from_parts(a.parts().clone(), other_embeddings).unwrap();
    assert_ne!(rebound.fingerprint(), a.fingerprint());
    let same = FeaturePipeline::from_parts(a.parts().clone(), FeatureResources::builtin()).unwrap();
    assert_eq!(same.fingerprint(), a.fingerprint());
}

#[test]
fn missing_embeddings_is_an_error() {
    let mut res = FeatureResources::builtin();
    res.embeddings = None;
    let err = FeaturePipeline::fit(&posts(), &FeaturePreset::Full.config(), res).unwrap_err();
    assert!(err.to_string().contains("embedding"), "{err}");
    // Not needed when the block is off.
    let mut res = FeatureResources::builtin();
    res.embeddings = None;
    FeaturePipeline::fit(&posts(), &FeaturePreset::TfidfLexicons.config(), res).unwrap();
}

#[test]
fn empty_body_gives_finite_vector() {
    let p = fit(FeaturePreset::FullHeuristics);
    let v = p.transform_one(&LabeledPost::unlabeled("e", ""));
    assert!(v.sparse.is_empty());
    assert!(v.is_finite());
}

#[test]
fn dense_block_is_standardized_on_training_posts() {
    let p = fit(FeaturePreset::Full);
    let rows: Vec<Vec<f64>> = p.transform(&posts()).into_iter().map(|v| v.dense).collect();
    let scaled = p.parts().scaler.width();
    for j in 0..scaled {
        let mean: f64 = rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64;
        assert!(
            mean.abs() < 1e-9,
            "column {} mean {mean}",
            p.dense_names()[j]
        );
    }
}

#[test]
fn vector_helpers_agree() {
    let p = fit(FeaturePreset::Full);
    let v = p.transform_one(&posts()[0]);
    let dense = v.to_dense();
    let w: Vec<f64> = (0..v.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
    let direct: f64 = dense.iter().zip(&w).map(|(a, b)| a * b).sum();
    assert!((v.dot(&w) - direct).abs() < 1e-9);
    let norm: f64 = dense.iter().map(|x| x * x).sum();
    assert!((v.squared_norm() - norm).abs() < 1e-9);
}
