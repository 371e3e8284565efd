# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled score buffer: the hot kernel behind the dynamic threshold.

Keeps scores in a sorted C double array. Insertion is a binary search plus
memmove; the quantile is evaluated in O(1) from the sorted array using the
same double-precision expression as the pure backend, so results are
bit-identical between backends.
"""

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memmove
from libc.math cimport floor

from cascadegate.errors import EmptySampleError


cdef class ScoreBuffer:
    cdef double* _data
    cdef Py_ssize_t _size
    cdef Py_ssize_t _capacity

    def __cinit__(self):
        self._capacity = 64
        self._size = 0
        self._data = <double*> malloc(self._capacity * sizeof(double))
        if self._data == NULL:
            raise MemoryError()

    def __dealloc__(self):
        if self._data != NULL:
            free(self._data)

    def __len__(self):
        return self._size

    cdef void _grow(self) except *:
        cdef Py_ssize_t new_capacity = self._capacity * 2
        cdef double* new_data = <double*> realloc(self._data, new_capacity * sizeof(double))
        if new_data == NULL:
            raise MemoryError()
        self._data = new_data
        self._capacity = new_capacity

    cdef Py_ssize_t _insertion_point(self, double score) nogil:
        # bisect_right, matching the pure backend's insort.
        cdef Py_ssize_t lo = 0
        cdef Py_ssize_t hi = self._size
        cdef Py_ssize_t mid
        while lo < hi:
            mid = (lo + hi) >> 1
            if score < self._data[mid]:
                hi = mid
            else:
                lo = mid + 1
        return lo

    cpdef void push(self, double score) except *:
        if self._size == self._capacity:
            self._grow()
        cdef Py_ssize_t pos = self._insertion_point(score)
        if pos < self._size:
            memmove(self._data + pos + 1, self._data + pos,
                    (self._size - pos) * sizeof(double))
        self._data[pos] = score
        self._size += 1

    cpdef void replace_at(self, Py_ssize_t index, double score) except *:
        """Drop the index-th smallest stored score and insert a new one."""
        if index < 0 or index >= self._size:
            raise IndexError(index)
        if index < self._size - 1:
            memmove(self._data + index, self._data + index + 1,
                    (self._size - index - 1) * sizeof(double))
        self._size -= 1
        self.push(score)

    cpdef double quantile(self, double p) except *:
        cdef Py_ssize_t n = self._size
        if n == 0:
            raise EmptySampleError("quantile of an empty score buffer")
        cdef double h = p * <double>(n - 1)
        cdef Py_ssize_t i = <Py_ssize_t> floor(h)
        if i + 1 >= n:
            return self._data[n - 1]
        return self._data[i] + (h - <double>i) * (self._data[i + 1] - self._data[i])

    def values(self):
        return [self._data[i] for i in range(self._size)]
