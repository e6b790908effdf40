#include "stordual/alloc_probe.hpp"

#include <malloc.h>

#include <algorithm>
#include <cstdlib>
#include <new>

namespace {

thread_local std::size_t g_live = 0;
thread_local std::size_t g_peak = 0;
thread_local std::size_t g_allocations = 0;
thread_local std::size_t g_frees = 0;

void* tracked_alloc(std::size_t size) {
  void* p = std::malloc(size == 0 ? 1 : size);
  if (p != nullptr) {
    g_live += malloc_usable_size(p);
    g_peak = std::max(g_peak, g_live);
    ++g_allocations;
  }
  return p;
}

void* tracked_aligned_alloc(std::size_t size, std::size_t align) {
  const std::size_t rounded = (size + align - 1) / align * align;
  void* p = std::aligned_alloc(align, rounded == 0 ? align : rounded);
  if (p != nullptr) {
    g_live += malloc_usable_size(p);
    g_peak = std::max(g_peak, g_live);
    ++g_allocations;
  }
  return p;
}

void tracked_free(void* p) {
  if (p == nullptr) return;
  const std::size_t size = malloc_usable_size(p);
  g_live -= std::min(g_live, size);
  ++g_frees;
  std::free(p);
}

}  // namespace

namespace stordual::alloc_probe {

void reset() {
  g_peak = g_live;
  g_allocations = 0;
  g_frees = 0;
}

Stats stats() { return Stats{g_live, g_peak, g_allocations, g_frees}; }

bool active() { return true; }

}  // namespace stordual::alloc_probe

void* operator new(std::size_t size) {
  void* p = tracked_alloc(size);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void* operator new[](std::size_t size) {
  void* p = tracked_alloc(size);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void* operator new(std::size_t size, const std::nothrow_t&) noexcept { return tracked_alloc(size); }

void* operator new[](std::size_t size, const std::nothrow_t&) noexcept {
  return tracked_alloc(size);
}

void* operator new(std::size_t size, std::align_val_t align) {
  void* p = tracked_aligned_alloc(size, static_cast<std::size_t>(align));
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void* operator new[](std::size_t size, std::align_val_t align) {
  void* p = tracked_aligned_alloc(size, static_cast<std::size_t>(align));
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void operator delete(void* p) noexcept { tracked_free(p); }
void operator delete[](void* p) noexcept { tracked_free(p); }
void operator delete(void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete(void* p, std::align_val_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::align_val_t) noexcept { tracked_free(p); }
void operator delete(void* p, std::size_t, std::align_val_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::size_t, std::align_val_t) noexcept { tracked_free(p); }
void operator delete(void* p, const std::nothrow_t&) noexcept { tracked_free(p); }
void operator delete[](void* p, const std::nothrow_t&) noexcept { tracked_free(p); }
