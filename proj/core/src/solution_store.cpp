#include "cdg/solution_store.hpp"

// Header-only today; the translation unit pins the header's own includes.
