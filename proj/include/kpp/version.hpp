#ifndef KPP_VERSION_HPP
#define KPP_VERSION_HPP

#define KPP_VERSION_STRING "0.1.0"

#endif
