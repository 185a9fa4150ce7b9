// Copyright 2026 The blindqc Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Short `Copy` buffers stored inline, cloned with a single copy.

use std::ops::{Deref, DerefMut};

use smallvec::SmallVec;

#[derive(Debug, PartialEq, Eq)]
pub(crate) struct Inline<T: Copy, const N: usize>(SmallVec<[T; N]>);

impl<T: Copy, const N: usize> Inline<T, N> {
    pub fn new() -> Self {
        Inline(SmallVec::new())
    }
}

impl<T: Copy, const N: usize> Clone for Inline<T, N> {
    fn clone(&self) -> Self {
        Inline(SmallVec::from_slice(&self.0))
    }
}

impl<T: Copy, const N: usize> Deref for Inline<T, N> {
    type Target = SmallVec<[T; N]>;
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<T: Copy, const N: usize> DerefMut for Inline<T, N> {
    fn deref_mut(&mut self) -> &mut Self::Target {
        &mut self.0
    }
}

impl<T: Copy, const N: usize> From<&[T]> for Inline<T, N> {
    fn from(items: &[T]) -> Self {
        Inline(SmallVec::from_slice(items))
    }
}

impl<T: Copy, const N: usize> From<Vec<T>> for Inline<T, N> {
    fn from(items: Vec<T>) -> Self {
        Inline(SmallVec::from_vec(items))
    }
}

impl<T: Copy, const N: usize> FromIterator<T> for Inline<T, N> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Inline(iter.into_iter().collect())
    }
}

impl<'a, T: Copy, const N: usize> IntoIterator for &'a Inline<T, N> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
