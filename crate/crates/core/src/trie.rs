use std::collections::HashMap;

use crate::kb::FormId;

/// Trie over canonical word ids. Each node may terminate several forms
/// (homonyms share a key).
#[derive(Debug, Clone)]
pub struct FormTrie {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Default)]
struct Node {
    children: HashMap<u32, u32>,
    terminals: Vec<FormId>,
}

impl Default for FormTrie {
    fn default() -> Self {
        Self::new()
    }
}

impl FormTrie {
    pub fn new() -> Self {
        Self {
            nodes: vec![Node::default()],
        }
    }

    pub fn insert(&mut self, key: &[u32], form: FormId) {
        let mut node = 0usize;
        for &atom in key {
            let next = match self.nodes[node].children.get(&atom) {
                Some(&n) => n as usize,
                None => {
                    self.nodes.push(Node::default());
                    let n = self.nodes.len() - 1;
                    self.nodes[node].children.insert(atom, n as u32);
                    n
                }
            };
            node = next;
        }
        let terminals = &mut self.nodes[node].terminals;
        if !terminals.contains(&form) {
            terminals.push(form);
            terminals.sort();
        }
    }

    pub fn root(&self) -> TrieCursor {
        TrieCursor(0)
    }

    pub fn step(&self, cursor: TrieCursor, atom: u32) -> Option<TrieCursor> {
        self.nodes[cursor.0 as usize]
            .children
            .get(&atom)
            .map(|&n| TrieCursor(n))
    }

    pub fn terminals(&self, cursor: TrieCursor) -> &[FormId] {
        &self.nodes[cursor.0 as usize].terminals
    }

    /// Exact lookup of a full key.
    pub fn get(&self, key: &[u32]) -> &[FormId] {
        let mut cursor = self.root();
        for &atom in key {
            match self.step(cursor, atom) {
                Some(c) => cursor = c,
                None => return &[],
            }
        }
        self.terminals(cursor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrieCursor(u32);
