#pragma once

#define MEANFIELD_VERSION "0.1.0"
