//! Template streams: a domain-independent enumeration by weight, or an
//! explicit list (usually read from a template file).

use crate::lang::{LangError, Template, TypeSignature};

use super::Problem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateSource {
    /// Sensor signature plus invented predicates and objects, by increasing
    /// weight up to `max_weight`.
    DomainIndependent { max_weight: usize },
    /// A fixed list, tried in order. Each is merged with the task signature.
    Explicit(Vec<Template>),
}

/// Invented unary + invented binary + invented objects + (rules - 1) +
/// (body bound - 1).
pub fn template_weight(inv_unary: usize, inv_binary: usize, inv_objects: usize, rules: usize, n_body: usize) -> usize {
    inv_unary + inv_binary + inv_objects + rules.saturating_sub(1) + n_body.saturating_sub(1)
}

pub fn enumerate_templates(source: &TemplateSource, problem: &Problem) -> Result<Vec<Template>, LangError> {
    match source {
        TemplateSource::Explicit(list) => list
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.signature.extend(&problem.signature)?;
                Ok(t)
            })
            .collect(),
        TemplateSource::DomainIndependent { max_weight } => domain_independent(&problem.signature, *max_weight),
    }
}

fn taken(sig: &TypeSignature, name: &str) -> bool {
    sig.types.contains(name)
        || sig.objects.contains_key(name)
        || sig.predicates.contains_key(name)
        || sig.variables.contains_key(name)
}

fn fresh(sig: &TypeSignature, prefix: &str, counter: &mut usize) -> String {
    loop {
        *counter += 1;
        let name = format!("{prefix}{counter}");
        if !taken(sig, &name) {
            return name;
        }
    }
}

/// Builds one template from the sensor signature and the invented parts.
pub fn invent(
    base: &TypeSignature,
    inv_unary: usize,
    inv_binary: usize,
    inv_objects: usize,
    n_static: usize,
    n_causal: usize,
    n_body: usize,
) -> Result<Template, LangError> {
    let mut sig = base.clone();
    let ty = match sig.types.iter().next() {
        Some(t) => t.clone(),
        None => {
            sig.add_type("thing")?;
            "thing".to_string()
        }
    };
    let (mut po, mut pp) = (0, 0);
    for _ in 0..inv_objects {
        let o = fresh(&sig, "obj", &mut po);
        sig.add_object(&o, &ty)?;
    }
    for _ in 0..inv_unary {
        let p = fresh(&sig, "p", &mut pp);
        sig.add_pred(&p, &[&ty])?;
    }
    for _ in 0..inv_binary {
        let p = fresh(&sig, "p", &mut pp);
        sig.add_pred(&p, &[&ty, &ty])?;
    }
    // Variables per type: enough for one binary atom, a third for longer bodies.
    let types: Vec<String> = sig.types.iter().cloned().collect();
    let single = types.len() == 1;
    for t in &types {
        if !sig.vars_of(t).is_empty() {
            continue;
        }
        let binary = sig.predicates.values().any(|a| a.len() == 2 && a.contains(t));
        let n = match (binary, n_body) {
            (false, 1) => 1,
            (false, _) => 2,
            (true, 1 | 2) => 2,
            (true, _) => 3,
        };
        let prefix = if single { "v".to_string() } else { format!("{t}_v") };
        let mut c = 0;
        for _ in 0..n {
            let v = fresh(&sig, &prefix, &mut c);
            sig.add_var(&v, t)?;
        }
    }
    Ok(Template {
        signature: sig,
        n_static,
        n_causal,
        n_body,
    })
}

/// All templates of weight at most `max_weight`, by weight and then
/// lexicographically on (unary, binary, objects, static, causal, body).
pub fn domain_independent(base: &TypeSignature, max_weight: usize) -> Result<Vec<Template>, LangError> {
    let mut keys = Vec::new();
    let m = max_weight;
    for u in 0..=m {
        for b in 0..=m {
            for o in 0..=m {
                for ns in 0..=m + 1 {
                    for nc in 0..=m + 1 {
                        for nb in 1..=m + 1 {
                            if ns + nc == 0 {
                                continue;
                            }
                            let w = template_weight(u, b, o, ns + nc, nb);
                            if w <= m {
                                keys.push((w, u, b, o, ns, nc, nb));
                            }
                        }
                    }
                }
            }
        }
    }
    keys.sort();
    keys.into_iter()
        .map(|(_, u, b, o, ns, nc, nb)| invent(base, u, b, o, ns, nc, nb))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sensors() -> TypeSignature {
        let mut s = TypeSignature::new();
        s.add_type("sensor").unwrap();
        s.add_object("a", "sensor").unwrap();
        s.add_object("b", "sensor").unwrap();
        s.add_pred("on", &["sensor"]).unwrap();
        s.add_pred("off", &["sensor"]).unwrap();
        s
    }

    #[test]
    fn weight_zero_is_sensors_with_one_short_rule() {
        let ts = domain_independent(&sensors(), 0).unwrap();
        assert!(!ts.is_empty());
        for t in &ts {
            assert_eq!(t.n_static + t.n_causal, 1);
            assert_eq!(t.n_body, 1);
            assert_eq!(t.signature.predicates.len(), 2);
            assert_eq!(t.signature.objects.len(), 2);
        }
    }

    #[test]
    fn weights_never_decrease() {
        let ts = domain_independent(&sensors(), 3).unwrap();
        let w: Vec<usize> = ts
            .iter()
            .map(|t| {
                let sig = &t.signature;
                let unary = sig.predicates.values().filter(|a| a.len() == 1).count() - 2;
                let binary = sig.predicates.values().filter(|a| a.len() == 2).count();
                template_weight(unary, binary, sig.objects.len() - 2, t.n_static + t.n_causal, t.n_body)
            })
            .collect();
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        assert_eq!(*w.last().unwrap(), 3);
    }

    #[test]
    fn invented_names_follow_template_order() {
        let t = invent(&sensors(), 2, 1, 1, 0, 2, 2).unwrap();
        assert!(t.signature.objects.contains_key("obj1"));
        assert_eq!(t.signature.predicates["p1"], vec!["sensor".to_string()]);
        assert_eq!(t.signature.predicates["p3"].len(), 2);
        assert_eq!(t.signature.vars_of("sensor"), vec!["v1", "v2"]);
    }
}
