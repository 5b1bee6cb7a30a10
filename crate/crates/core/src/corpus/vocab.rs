//! Controlled vocabulary: a poly-hierarchical term tree with designated
//! clinical root categories.
//!
//! File format (UTF-8): a header line `clinical_roots: id1,id2,...`
//! followed by one line per term, `id<TAB>name<TAB>parent1,parent2,...`.
//! Root terms omit the parent field or leave it empty.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::TermId;

#[derive(Debug, Error)]
pub enum VocabError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("missing 'clinical_roots:' header line")]
    MissingHeader,
    #[error("line {line}: expected 'id<TAB>name[<TAB>parents]'")]
    BadLine { line: usize },
    #[error("line {line}: duplicate term {id}")]
    DuplicateTerm { line: usize, id: TermId },
    #[error("term {term} references undefined parent {parent}")]
    UndefinedParent { term: TermId, parent: TermId },
    #[error("parent cycle: {}", path.join(" -> "))]
    Cycle { path: Vec<String> },
    #[error("clinical root {0} is not defined")]
    UnknownClinicalRoot(TermId),
    #[error("clinical root {0} is not a root term")]
    ClinicalRootNotRoot(TermId),
    #[error("unknown term {0}")]
    UnknownTerm(TermId),
}

/// Validated vocabulary.
///
/// Invariants: the parent relation is acyclic with every parent defined
/// (hence every term reaches a root), and `clinical_roots ⊆ roots`.
/// `clinical` is the precomputed closure: terms whose ancestor-or-self set
/// intersects `clinical_roots`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularyTree {
    names: BTreeMap<TermId, String>,
    parents: BTreeMap<TermId, BTreeSet<TermId>>,
    roots: BTreeSet<TermId>,
    clinical_roots: BTreeSet<TermId>,
    clinical: BTreeSet<TermId>,
}

impl VocabularyTree {
    pub fn build(
        terms: Vec<(TermId, String, BTreeSet<TermId>)>,
        clinical_roots: BTreeSet<TermId>,
    ) -> Result<VocabularyTree, VocabError> {
        let mut names = BTreeMap::new();
        let mut parents = BTreeMap::new();
        for (id, name, term_parents) in terms {
            if names.insert(id.clone(), name).is_some() {
                return Err(VocabError::DuplicateTerm { line: 0, id });
            }
            parents.insert(id, term_parents);
        }
        for (term, term_parents) in &parents {
            for parent in term_parents {
                if !names.contains_key(parent) {
                    return Err(VocabError::UndefinedParent {
                        term: term.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        detect_cycle(&parents)?;
        let roots: BTreeSet<TermId> = parents
            .iter()
            .filter(|(_, p)| p.is_empty())
            .map(|(id, _)| id.clone())
            .collect();
        for id in &clinical_roots {
            if !names.contains_key(id) {
                return Err(VocabError::UnknownClinicalRoot(id.clone()));
            }
            if !roots.contains(id) {
                return Err(VocabError::ClinicalRootNotRoot(id.clone()));
            }
        }
        // Closure: walk child links downward from the clinical roots.
        let mut children: BTreeMap<&TermId, BTreeSet<&TermId>> = BTreeMap::new();
        for (term, term_parents) in &parents {
            for parent in term_parents {
                children.entry(parent).or_default().insert(term);
            }
        }
        let mut clinical: BTreeSet<TermId> = clinical_roots.clone();
        let mut queue: Vec<&TermId> = clinical_roots.iter().collect();
        while let Some(term) = queue.pop() {
            if let Some(kids) = children.get(term) {
                for &kid in kids {
                    if clinical.insert(kid.clone()) {
                        queue.push(kid);
                    }
                }
            }
        }
        Ok(VocabularyTree {
            names,
            parents,
            roots,
            clinical_roots,
            clinical,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, term: &TermId) -> bool {
        self.names.contains_key(term)
    }

    pub fn name(&self, term: &TermId) -> Option<&str> {
        self.names.get(term).map(String::as_str)
    }

    pub fn parents(&self, term: &TermId) -> Option<&BTreeSet<TermId>> {
        self.parents.get(term)
    }

    pub fn roots(&self) -> &BTreeSet<TermId> {
        &self.roots
    }

    pub fn clinical_roots(&self) -> &BTreeSet<TermId> {
        &self.clinical_roots
    }

    pub fn terms(&self) -> impl Iterator<Item = &TermId> {
        self.names.keys()
    }

    /// True iff the term or one of its ancestors is a clinical root.
    pub fn is_clinical(&self, term: &TermId) -> Result<bool, VocabError> {
        if !self.contains(term) {
            return Err(VocabError::UnknownTerm(term.clone()));
        }
        Ok(self.clinical.contains(term))
    }

    /// Strict ancestors (excludes the term itself).
    pub fn ancestors(&self, term: &TermId) -> Result<BTreeSet<TermId>, VocabError> {
        if !self.contains(term) {
            return Err(VocabError::UnknownTerm(term.clone()));
        }
        let mut seen = BTreeSet::new();
        let mut queue: Vec<&TermId> = self.parents[term].iter().collect();
        while let Some(parent) = queue.pop() {
            if seen.insert(parent.clone()) {
                queue.extend(self.parents[parent].iter());
            }
        }
        Ok(seen)
    }

    /// Serializes in the file format; terms sorted by id, parents by id.
    pub fn to_text(&self) -> String {
        let mut out = String::from("clinical_roots: ");
        out.push_str(
            &self
                .clinical_roots
                .iter()
                .map(TermId::as_str)
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for (term, name) in &self.names {
            let parents = self.parents[term]
                .iter()
                .map(TermId::as_str)
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!("{term}\t{name}\t{parents}\n"));
        }
        out
    }
}

pub fn load_vocabulary(input: &str) -> Result<VocabularyTree, VocabError> {
    let mut lines = input.lines().enumerate();
    let clinical_roots = loop {
        let Some((_, line)) = lines.next() else {
            return Err(VocabError::MissingHeader);
        };
        if line.trim().is_empty() {
            continue;
        }
        let Some(rest) = line.trim().strip_prefix("clinical_roots:") else {
            return Err(VocabError::MissingHeader);
        };
        break rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(TermId::from)
            .collect::<BTreeSet<_>>();
    };
    let mut terms = Vec::new();
    let mut seen: BTreeSet<TermId> = BTreeSet::new();
    for (number, line) in lines {
        let number = number + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let id = fields.next().map(str::trim).unwrap_or_default();
        let name = fields.next().map(str::trim);
        let parents = fields.next().map(str::trim).unwrap_or_default();
        let (Some(name), false) = (name, id.is_empty()) else {
            return Err(VocabError::BadLine { line: number });
        };
        let id = TermId::from(id);
        if !seen.insert(id.clone()) {
            return Err(VocabError::DuplicateTerm { line: number, id });
        }
        let parents: BTreeSet<TermId> = parents
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(TermId::from)
            .collect();
        terms.push((id, name.to_owned(), parents));
    }
    VocabularyTree::build(terms, clinical_roots)
}

pub fn load_vocabulary_file(path: &std::path::Path) -> Result<VocabularyTree, VocabError> {
    let text = std::fs::read_to_string(path)?;
    load_vocabulary(&text)
}

fn detect_cycle(parents: &BTreeMap<TermId, BTreeSet<TermId>>) -> Result<(), VocabError> {
    let ids: Vec<&TermId> = parents.keys().collect();
    let index: BTreeMap<&TermId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let parent_lists: Vec<Vec<usize>> = ids
        .iter()
        .map(|id| parents[*id].iter().map(|p| index[p]).collect())
        .collect();
    // 0 = unvisited, 1 = on the current DFS path, 2 = finished.
    let mut color = vec![0u8; ids.len()];
    for start in 0..ids.len() {
        if color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        color[start] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next < parent_lists[node].len() {
                let parent = parent_lists[node][*next];
                *next += 1;
                match color[parent] {
                    1 => {
                        // Back edge: the cycle is the stack suffix from `parent`.
                        let from = stack
                            .iter()
                            .position(|&(n, _)| n == parent)
                            .expect("gray nodes are on the stack");
                        let mut path: Vec<String> = stack[from..]
                            .iter()
                            .map(|&(n, _)| ids[n].to_string())
                            .collect();
                        path.push(ids[parent].to_string());
                        return Err(VocabError::Cycle { path });
                    }
                    0 => {
                        color[parent] = 1;
                        stack.push((parent, 0));
                    }
                    _ => {}
                }
            } else {
                color[node] = 2;
                stack.pop();
            }
        }
    }
    Ok(())
}
