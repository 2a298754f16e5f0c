use std::hash::BuildHasher;

use foldhash::fast::RandomState;

use hashbrown::HashTable;

use super::Payload;

/// Randomly seeded hash table over fixed-width keys. Keys live contiguously
/// in one arena; the table stores 32 hash bits next to each arena slot so
/// growing the table never touches the arena.
#[derive(Clone, Debug)]
pub(crate) struct HashedMap {
    width: usize,
    table: HashTable<(u32, u32)>,
    keys: Vec<i64>,
    payloads: Vec<Payload>,
    hasher: RandomState,
}

/// Table hash recovered from the stored 32 bits; the multiplication spreads
/// them over the high bits the table uses for its control bytes.
#[inline]
fn spread(h: u32) -> u64 {
    (h as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

impl HashedMap {
    #[inline]
    fn hash32(&self, cells: &[i64]) -> u32 {
        self.hasher.hash_one(cells) as u32
    }

    pub(crate) fn new(width: usize) -> Self {
        HashedMap {
            width,
            table: HashTable::new(),
            keys: Vec::new(),
            payloads: Vec::new(),
            hasher: RandomState::default(),
        }
    }

    fn key(&self, slot: u32) -> &[i64] {
        let s = slot as usize * self.width;
        &self.keys[s..s + self.width]
    }

    fn find(&self, cells: &[i64]) -> Option<u32> {
        let h = self.hash32(cells);
        self.table
            .find(spread(h), |&(eh, s)| eh == h && self.key(s) == cells)
            .map(|&(_, s)| s)
    }

    pub(crate) fn get(&self, cells: &[i64]) -> Option<&Payload> {
        self.find(cells).map(|s| &self.payloads[s as usize])
    }

    pub(crate) fn get_mut(&mut self, cells: &[i64]) -> Option<&mut Payload> {
        self.find(cells).map(|s| &mut self.payloads[s as usize])
    }

    pub(crate) fn insert(&mut self, cells: &[i64], payload: Payload) {
        debug_assert_eq!(cells.len(), self.width);
        if let Some(s) = self.find(cells) {
            self.payloads[s as usize] = payload;
            return;
        }
        let slot = u32::try_from(self.payloads.len()).expect("hashed dictionary exceeds u32::MAX entries");
        self.keys.extend_from_slice(cells);
        self.payloads.push(payload);
        let h = self.hash32(cells);
        self.table.insert_unique(spread(h), (h, slot), |&(eh, _)| spread(eh));
    }

    pub(crate) fn remove(&mut self, cells: &[i64]) -> Option<Payload> {
        let h = self.hash32(cells);
        let (width, keys) = (self.width, &self.keys);
        let slot = match self.table.find_entry(spread(h), |&(eh, s)| {
            eh == h && &keys[s as usize * width..(s as usize + 1) * width] == cells
        }) {
            Ok(entry) => entry.remove().0 .1,
            Err(_) => return None,
        };
        // Move the last arena entry into the freed slot.
        let last = (self.payloads.len() - 1) as u32;
        if slot != last {
            let lh = self.hash32(self.key(last));
            self.table
                .find_mut(spread(lh), |&(_, s)| s == last)
                .expect("arena slot is indexed")
                .1 = slot;
            let (dst, src) = (slot as usize * width, last as usize * width);
            self.keys.copy_within(src..src + width, dst);
        }
        self.keys.truncate(last as usize * width);
        Some(self.payloads.swap_remove(slot as usize))
    }

    pub(crate) fn len(&self) -> usize {
        self.payloads.len()
    }

    pub(crate) fn for_each(&self, mut visit: impl FnMut(&[i64], &Payload)) {
        for (k, v) in self.keys.chunks_exact(self.width).zip(&self.payloads) {
            visit(k, v);
        }
    }
}
