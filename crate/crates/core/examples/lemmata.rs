//! Lemma verdicts and classification for every built-in algebra.

use deform_forge::catalog::{builtin, BUILTIN_NAMES};
use deform_forge::lemmata::{classify, LemmaKind, Lemmata};

fn main() {
    for name in BUILTIN_NAMES {
        let e = builtin(name).unwrap();
        let lem = Lemmata::new(&e.algebra);
        let verdicts: Vec<String> = [LemmaKind::Mild, LemmaKind::DualMild, LemmaKind::Weak, LemmaKind::Strong]
            .into_iter()
            .map(|k| format!("{}={}", k.key(), lem.check(k, None).holds))
            .collect();
        println!("{name:<18} {:<26} {}", classify(&e.algebra).key(), verdicts.join(" "));
    }

    let iw = builtin("iwasawa").unwrap();
    let v = Lemmata::new(&iw.algebra).check(LemmaKind::Mild, None);
    if let Some(w) = v.witness {
        println!("\niwasawa mild witness:");
        if let Some(src) = w.source {
            println!("  source  {src}");
        }
        println!("  form    {}", w.form);
        println!("  note    {}", w.note);
    }
}
