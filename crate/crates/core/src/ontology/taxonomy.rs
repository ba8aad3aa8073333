//! Rooted hypernym tree with Wu-Palmer similarity.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::OntologyError;

/// A group of parent-child edges as written in configuration documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxonomyEdges {
    pub parent: String,
    pub children: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    name: String,
    parent: Option<usize>,
    depth: usize,
}

#[derive(Debug, Clone)]
pub struct Taxonomy {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
}

impl Taxonomy {
    /// Build from edge groups. Every node must have at most one parent and
    /// exactly one node (the root) has none.
    pub fn from_edges(groups: &[TaxonomyEdges]) -> Result<Self, OntologyError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut parent_of: Vec<Option<usize>> = Vec::new();

        let mut intern = |name: &str, names: &mut Vec<String>, parent_of: &mut Vec<Option<usize>>| {
            let key = name.trim().to_lowercase();
            *index.entry(key.clone()).or_insert_with(|| {
                names.push(key);
                parent_of.push(None);
                names.len() - 1
            })
        };

        for (g, group) in groups.iter().enumerate() {
            let p = intern(&group.parent, &mut names, &mut parent_of);
            for (c, child) in group.children.iter().enumerate() {
                let k = intern(child, &mut names, &mut parent_of);
                if k == p {
                    return Err(OntologyError::Schema {
                        path: format!("ontology.taxonomy[{g}].children[{c}]"),
                        message: format!("{child:?} cannot be its own parent"),
                    });
                }
                match parent_of[k] {
                    Some(existing) if existing != p => {
                        return Err(OntologyError::Schema {
                            path: format!("ontology.taxonomy[{g}].children[{c}]"),
                            message: format!(
                                "{child:?} already has parent {:?}",
                                names[existing]
                            ),
                        });
                    }
                    _ => parent_of[k] = Some(p),
                }
            }
        }

        let roots: Vec<usize> = (0..names.len()).filter(|&i| parent_of[i].is_none()).collect();
        if roots.len() != 1 {
            let listed: Vec<&str> = roots.iter().map(|&r| names[r].as_str()).collect();
            return Err(OntologyError::Schema {
                path: "ontology.taxonomy".to_string(),
                message: format!("expected a single root, found {listed:?}"),
            });
        }

        let mut depth = vec![0usize; names.len()];
        for start in 0..names.len() {
            let mut chain = Vec::new();
            let mut cur = start;
            while depth[cur] == 0 {
                if chain.len() > names.len() {
                    return Err(OntologyError::Schema {
                        path: "ontology.taxonomy".to_string(),
                        message: format!("cycle through {:?}", names[start]),
                    });
                }
                chain.push(cur);
                match parent_of[cur] {
                    Some(p) => cur = p,
                    None => {
                        depth[cur] = 1;
                        chain.pop();
                        break;
                    }
                }
            }
            let mut d = depth[cur];
            for &n in chain.iter().rev() {
                d += 1;
                depth[n] = d;
            }
        }

        let nodes = names
            .into_iter()
            .enumerate()
            .map(|(i, name)| Node {
                name,
                parent: parent_of[i],
                depth: depth[i],
            })
            .collect();
        Ok(Self { nodes, index })
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.index.contains_key(&concept.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &str {
        self.nodes
            .iter()
            .find(|n| n.parent.is_none())
            .map(|n| n.name.as_str())
            .unwrap_or_default()
    }

    pub fn depth(&self, concept: &str) -> Option<usize> {
        self.index
            .get(&concept.to_lowercase())
            .map(|&i| self.nodes[i].depth)
    }

    pub fn parent(&self, concept: &str) -> Option<&str> {
        let i = *self.index.get(&concept.to_lowercase())?;
        self.nodes[i].parent.map(|p| self.nodes[p].name.as_str())
    }

    pub fn is_leaf(&self, concept: &str) -> bool {
        match self.index.get(&concept.to_lowercase()) {
            Some(&i) => !self.nodes.iter().any(|n| n.parent == Some(i)),
            None => false,
        }
    }

    /// True when `ancestor` lies on the path from `concept` to the root
    /// (a concept is its own descendant).
    pub fn is_descendant(&self, concept: &str, ancestor: &str) -> bool {
        let (Some(&a), Some(&start)) = (
            self.index.get(&ancestor.to_lowercase()),
            self.index.get(&concept.to_lowercase()),
        ) else {
            return false;
        };
        let mut cur = Some(start);
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            cur = self.nodes[c].parent;
        }
        false
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.name.as_str())
    }

    fn id(&self, concept: &str) -> Result<usize, OntologyError> {
        self.index
            .get(&concept.to_lowercase())
            .copied()
            .ok_or_else(|| OntologyError::UnknownConcept(concept.to_string()))
    }

    /// Lowest common subsumer of two concepts.
    pub fn lcs(&self, a: &str, b: &str) -> Result<&str, OntologyError> {
        let (mut x, mut y) = (self.id(a)?, self.id(b)?);
        while self.nodes[x].depth > self.nodes[y].depth {
            x = self.nodes[x].parent.expect("non-root has parent");
        }
        while self.nodes[y].depth > self.nodes[x].depth {
            y = self.nodes[y].parent.expect("non-root has parent");
        }
        while x != y {
            x = self.nodes[x].parent.expect("non-root has parent");
            y = self.nodes[y].parent.expect("non-root has parent");
        }
        Ok(&self.nodes[x].name)
    }

    /// 2·depth(lcs) / (depth(a) + depth(b)).
    pub fn wup_similarity(&self, a: &str, b: &str) -> Result<f64, OntologyError> {
        let da = self.nodes[self.id(a)?].depth;
        let db = self.nodes[self.id(b)?].depth;
        let dl = self.depth(self.lcs(a, b)?).expect("lcs is a node");
        Ok(2.0 * dl as f64 / (da + db) as f64)
    }

    /// Edge groups in node-creation order, one group per parent.
    pub fn to_edges(&self) -> Vec<TaxonomyEdges> {
        let mut groups: Vec<TaxonomyEdges> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for n in &self.nodes {
            if let Some(p) = n.parent {
                let g = *slot.entry(p).or_insert_with(|| {
                    groups.push(TaxonomyEdges {
                        parent: self.nodes[p].name.clone(),
                        children: Vec::new(),
                    });
                    groups.len() - 1
                });
                groups[g].children.push(n.name.clone());
            }
        }
        groups
    }
}

/// Two taxonomies are equal when they hold the same concepts under the same
/// parents, regardless of insertion order.
impl PartialEq for Taxonomy {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self.nodes.iter().all(|n| {
                other.contains(&n.name)
                    && other.parent(&n.name) == n.parent.map(|p| self.nodes[p].name.as_str())
            })
    }
}

impl Eq for Taxonomy {}

/// Convenience wrapper matching the free-function form used elsewhere.
pub fn wup_similarity(a: &str, b: &str, taxonomy: &Taxonomy) -> Result<f64, OntologyError> {
    taxonomy.wup_similarity(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(spec: &[(&str, &[&str])]) -> Vec<TaxonomyEdges> {
        spec.iter()
            .map(|(p, cs)| TaxonomyEdges {
                parent: p.to_string(),
                children: cs.iter().map(|c| c.to_string()).collect(),
            })
            .collect()
    }

    #[test]
    fn depths_and_wup() {
        let t = Taxonomy::from_edges(&edges(&[
            ("root", &["a", "b"]),
            ("a", &["a1", "a2"]),
            ("a1", &["a11"]),
        ]))
        .unwrap();
        assert_eq!(t.depth("root"), Some(1));
        assert_eq!(t.depth("a11"), Some(4));
        assert_eq!(t.lcs("a11", "a2").unwrap(), "a");
        assert!((t.wup_similarity("a11", "a2").unwrap() - 4.0 / 7.0).abs() < 1e-12);
        assert!((t.wup_similarity("root", "a11").unwrap() - 2.0 / 5.0).abs() < 1e-12);
        assert_eq!(t.wup_similarity("b", "b").unwrap(), 1.0);
    }

    #[test]
    fn rejects_two_parents_and_two_roots() {
        assert!(Taxonomy::from_edges(&edges(&[("r", &["x"]), ("s", &["x"])])).is_err());
        assert!(Taxonomy::from_edges(&edges(&[("r", &["x"]), ("s", &["y"])])).is_err());
        assert!(Taxonomy::from_edges(&edges(&[("r", &["x"]), ("x", &["r"])])).is_err());
    }

    #[test]
    fn unknown_concept() {
        let t = Taxonomy::from_edges(&edges(&[("r", &["x"])])).unwrap();
        assert!(matches!(
            t.wup_similarity("x", "nope"),
            Err(OntologyError::UnknownConcept(_))
        ));
    }
}
