#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cqm
{

    // Runs fn(i) for i in [0, n) on up to `threads` workers (strided); rethrows the first failure.
    template <class Fn>
    void parallel_for(std::size_t n, unsigned threads, Fn &&fn)
    {
        const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
        if (nt <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::vector<std::exception_ptr> errs(nt);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < nt; ++w)
            pool.emplace_back([&, w]
                              {
                                  try
                                  {
                                      for (std::size_t i = w; i < n; i += nt)
                                          fn(i);
                                  }
                                  catch (...)
                                  {
                                      errs[w] = std::current_exception();
                                  } });
        for (auto &t : pool)
            t.join();
        for (auto &e : errs)
            if (e)
                std::rethrow_exception(e);
    }

} // namespace cqm
