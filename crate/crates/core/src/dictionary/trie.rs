use super::Dictionary;

/// A dictionary entry matched at some input position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Match {
    pub code: u8,
    pub len: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Node {
    /// Sorted by label byte.
    children: Vec<(u8, u32)>,
    terminal: Option<u8>,
}

impl Node {
    fn child(&self, label: u8) -> Option<u32> {
        self.children
            .binary_search_by_key(&label, |&(b, _)| b)
            .ok()
            .map(|i| self.children[i].1)
    }
}

/// Byte trie over every pattern of a [`Dictionary`], learned and identity.
///
/// The root keeps a dense child table since almost every walk starts there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTrie {
    root: Box<[u32; 256]>,
    root_terminal: Box<[Option<u8>; 256]>,
    nodes: Vec<Node>,
}

const NONE: u32 = u32::MAX;

impl Default for PatternTrie {
    fn default() -> Self {
        Self::new()
    }
}

impl PatternTrie {
    pub fn new() -> Self {
        Self {
            root: Box::new([NONE; 256]),
            root_terminal: Box::new([None; 256]),
            nodes: Vec::new(),
        }
    }

    pub fn build(dict: &Dictionary) -> Self {
        let mut trie = Self::new();
        for &b in dict.identity() {
            trie.insert(&[b], b);
        }
        for (pattern, code) in dict.learned_with_codes() {
            trie.insert(pattern, code);
        }
        trie
    }

    /// Inserts `pattern` with output `code`. An existing terminal is overwritten.
    pub fn insert(&mut self, pattern: &[u8], code: u8) {
        let Some((&first, rest)) = pattern.split_first() else {
            return;
        };
        if rest.is_empty() {
            self.root_terminal[first as usize] = Some(code);
            return;
        }
        let mut node = match self.root[first as usize] {
            NONE => {
                let id = self.alloc();
                self.root[first as usize] = id;
                id
            }
            id => id,
        };
        for &b in rest {
            node = match self.nodes[node as usize].child(b) {
                Some(id) => id,
                None => {
                    let id = self.alloc();
                    let children = &mut self.nodes[node as usize].children;
                    let at = children.partition_point(|&(c, _)| c < b);
                    children.insert(at, (b, id));
                    id
                }
            };
        }
        self.nodes[node as usize].terminal = Some(code);
    }

    fn alloc(&mut self) -> u32 {
        self.nodes.push(Node::default());
        (self.nodes.len() - 1) as u32
    }

    /// Number of nodes below the root.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.root_terminal.iter().all(Option::is_none)
    }

    /// Looks up the code of an exact pattern.
    pub fn get(&self, pattern: &[u8]) -> Option<u8> {
        self.matches_at(pattern, 0)
            .find(|m| m.len == pattern.len())
            .map(|m| m.code)
    }

    /// Every dictionary pattern that is a prefix of `input[pos..]`, shortest first.
    pub fn matches_at<'a>(&'a self, input: &'a [u8], pos: usize) -> PrefixMatches<'a> {
        PrefixMatches {
            trie: self,
            input,
            pos,
            depth: 0,
            node: None,
            done: pos >= input.len(),
        }
    }

    /// Longest dictionary pattern that is a prefix of `input[pos..]`.
    pub fn longest_match(&self, input: &[u8], pos: usize) -> Option<Match> {
        self.matches_at(input, pos).last()
    }
}

/// Iterator returned by [`PatternTrie::matches_at`].
pub struct PrefixMatches<'a> {
    trie: &'a PatternTrie,
    input: &'a [u8],
    pos: usize,
    depth: usize,
    node: Option<u32>,
    done: bool,
}

impl Iterator for PrefixMatches<'_> {
    type Item = Match;

    fn next(&mut self) -> Option<Match> {
        while !self.done {
            let at = self.pos + self.depth;
            let Some(&b) = self.input.get(at) else {
                self.done = true;
                break;
            };
            let (next, terminal) = match self.node {
                None => {
                    let id = self.trie.root[b as usize];
                    let terminal = self.trie.root_terminal[b as usize];
                    ((id != NONE).then_some(id), terminal)
                }
                Some(node) => {
                    let child = self.trie.nodes[node as usize].child(b);
                    (
                        child,
                        child.and_then(|c| self.trie.nodes[c as usize].terminal),
                    )
                }
            };
            self.depth += 1;
            match next {
                Some(id) => self.node = Some(id),
                None => self.done = true,
            }
            if let Some(code) = terminal {
                return Some(Match {
                    code,
                    len: self.depth,
                });
            }
        }
        None
    }
}
