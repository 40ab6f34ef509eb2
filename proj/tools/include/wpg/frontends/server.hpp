#pragma once

#include <string>

#include "httplib.h"
#include "wpg/frontends/service.hpp"

namespace wpg::frontends {

// Routes /api/* on `server` to `service` (which must outlive it).
void mount(httplib::Server& server, AnnotationService& service);

// Binds host:port (port 0 picks a free one) and returns the bound port.
// Throws wpg::Error(kIo) when the address is taken.
int bind(httplib::Server& server, const std::string& host, int port);

}  // namespace wpg::frontends
