#pragma once

#include <coroutine>
#include <exception>
#include <optional>
#include <utility>

#include "cfsim/memory.hpp"

namespace cfsim {

// Per-process scheduling surface. A process coroutine runs local computation
// freely; whenever it needs shared memory it stages a request in `slot` and
// suspends. The scheduler performs the request atomically (that is the
// process's step) and resumes the coroutine with the result. A process has at
// most one request outstanding, so one stable slot per context suffices.
struct ProcessContext {
  int id = 0;  // 1-based process index
  struct Request {
    Action action;
    ActionResult result;
    std::coroutine_handle<> resume;
  };
  Request slot;
  Request* pending = nullptr;  // &slot while a request is staged
  int64_t gate = -1;  // do not run before this global step (workload not-before)
  std::coroutine_handle<> gate_resume;
  bool done = false;
  std::exception_ptr failure;
};

// Awaitable for one shared-memory action. Deliberately holds nothing but a
// reference: GCC 11's coroutine lowering destroys nontrivial temporaries in a
// co_await operand twice, so the awaiter must stay trivially destructible and
// the action itself is staged in the context's slot via mem_step. Callers
// build the Action as a named local and pass it with std::move — never as a
// temporary inside the co_await expression.
struct MemAwait {
  ProcessContext& ctx;

  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<> h) {
    ctx.slot.resume = h;
    ctx.pending = &ctx.slot;
  }
  ActionResult await_resume() { return std::move(ctx.slot.result); }
};

inline MemAwait mem_step(ProcessContext& ctx, Action&& a) {
  ctx.slot.action = std::move(a);
  return MemAwait{ctx};
}

// Awaitable that parks the process until a global step index is reached.
struct GateAwait {
  ProcessContext& ctx;
  int64_t step;

  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<> h) {
    ctx.gate = step;
    ctx.gate_resume = h;
  }
  void await_resume() const noexcept {}
};

// Nested coroutine returning T. Awaiting one starts it; its shared-memory
// awaits suspend the whole stack; completion resumes the awaiter via
// symmetric transfer. Single-owner, move-only.
//
// Await through a named local (`SimTask<T> t = f(...); co_await std::move(t)`),
// never `co_await f(...)` directly: the task's destructor is nontrivial and
// GCC 11 double-destroys nontrivial temporaries in co_await operands.
template <class T>
class [[nodiscard]] SimTask {
 public:
  struct promise_type {
    std::optional<T> value;
    std::exception_ptr failure;
    std::coroutine_handle<> continuation;

    SimTask get_return_object() {
      return SimTask(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    struct FinalAwaiter {
      bool await_ready() const noexcept { return false; }
      std::coroutine_handle<> await_suspend(std::coroutine_handle<promise_type> h) noexcept {
        auto cont = h.promise().continuation;
        return cont ? cont : std::noop_coroutine();
      }
      void await_resume() const noexcept {}
    };
    FinalAwaiter final_suspend() noexcept { return {}; }
    void return_value(T v) { value = std::move(v); }
    void unhandled_exception() { failure = std::current_exception(); }
  };

  explicit SimTask(std::coroutine_handle<promise_type> h) : h_(h) {}
  SimTask(SimTask&& o) noexcept : h_(std::exchange(o.h_, nullptr)) {}
  SimTask(const SimTask&) = delete;
  SimTask& operator=(const SimTask&) = delete;
  ~SimTask() {
    if (h_) h_.destroy();
  }

  struct Awaiter {
    std::coroutine_handle<promise_type> child;
    bool await_ready() const noexcept { return false; }
    std::coroutine_handle<> await_suspend(std::coroutine_handle<> parent) noexcept {
      child.promise().continuation = parent;
      return child;
    }
    T await_resume() {
      if (child.promise().failure) std::rethrow_exception(child.promise().failure);
      return std::move(*child.promise().value);
    }
  };
  Awaiter operator co_await() && noexcept { return Awaiter{h_}; }

 private:
  std::coroutine_handle<promise_type> h_;
};

// Root coroutine of a process: the whole program the process runs. The
// scheduler owns and resumes it; completion flips the context to done.
class Fiber {
 public:
  struct promise_type {
    ProcessContext* ctx = nullptr;

    Fiber get_return_object() {
      return Fiber(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    struct FinalAwaiter {
      bool await_ready() const noexcept { return false; }
      void await_suspend(std::coroutine_handle<promise_type> h) noexcept {
        if (h.promise().ctx) h.promise().ctx->done = true;
      }
      void await_resume() const noexcept {}
    };
    FinalAwaiter final_suspend() noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() {
      if (ctx) {
        ctx->failure = std::current_exception();
        ctx->done = true;
      }
    }
  };

  Fiber() = default;
  explicit Fiber(std::coroutine_handle<promise_type> h) : h_(h) {}
  Fiber(Fiber&& o) noexcept : h_(std::exchange(o.h_, nullptr)) {}
  Fiber& operator=(Fiber&& o) noexcept {
    if (h_) h_.destroy();
    h_ = std::exchange(o.h_, nullptr);
    return *this;
  }
  Fiber(const Fiber&) = delete;
  Fiber& operator=(const Fiber&) = delete;
  ~Fiber() {
    if (h_) h_.destroy();
  }

  void bind(ProcessContext& ctx) { h_.promise().ctx = &ctx; }
  void resume() { h_.resume(); }
  bool valid() const { return static_cast<bool>(h_); }

 private:
  std::coroutine_handle<promise_type> h_;
};

}  // namespace cfsim
